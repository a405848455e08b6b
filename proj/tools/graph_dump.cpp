// Prints the dependence graph of an inventory as an edge list or an
// adjacency matrix, for eyeballing and for piping into graph tooling.
//   graph_dump <inventory.json> [scope] [--matrix]

#include <cstdio>
#include <cstring>
#include <exception>
#include <string>

#include "vulrg/graph.hpp"
#include "vulrg/model.hpp"

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: graph_dump <inventory.json> [scope] [--matrix]\n");
        return 2;
    }
    std::string scope = vulrg::kSystemScope;
    bool matrix = false;
    for (int i = 2; i < argc; ++i) {
        if (std::strcmp(argv[i], "--matrix") == 0)
            matrix = true;
        else
            scope = argv[i];
    }
    try {
        vulrg::SystemModel m = vulrg::load_system_model(argv[1]);
        vulrg::DependenceGraph g = vulrg::build_dependence_graph(m, scope);
        std::fputs((matrix ? vulrg::export_matrix(g) : vulrg::export_edge_list(g)).c_str(),
                   stdout);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
