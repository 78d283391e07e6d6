// Regenerates the checked-in data files from the built-in definitions:
// the region catalog and the principal decomposition.
// Usage: lbsieve-gendata <data-dir>

#include <cstdio>
#include <string>

#include "lbsieve/catalog_io.hpp"
#include "lbsieve/decomposition_io.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s <data-dir>\n", argv[0]);
        return 2;
    }
    std::string dir = argv[1];
    lbsieve::regions::catalog::save(lbsieve::regions::catalog::all(),
                                    dir + "/regions.json");
    lbsieve::decomp::save_decomposition(lbsieve::decomp::principal_decomposition(),
                                        dir + "/decomposition_d1.json");
    return 0;
}
