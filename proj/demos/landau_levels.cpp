// Lowest Landau levels of the three solution families, with and without
// polarizability.

#include "dkp/dkp.hpp"

#include <cstdio>

int main()
{
    using namespace dkp;
    const PhysicalParams ordinary{1.0, 0.5, 0.0, 0.0};
    PhysicalParams polarizable = ordinary;
    polarizable.sigma = 0.1;

    std::printf("%-8s %2s %3s %14s %14s %14s\n", "branch", "n", "m", "eps(0)", "eps(0.1)", "shift eps^2");
    for (auto branch : all_branches) {
        for (int n = 0; n <= 1; ++n) {
            for (int m = -1; m <= 1; ++m) {
                const auto a = branch_level(ordinary, branch, n, m);
                const auto b = branch_level(polarizable, branch, n, m);
                std::printf("%-8s %2d %3d %14s %14s %14s\n", std::string(to_string(branch)).c_str(), n, m,
                            format_number(a.eps).c_str(), format_number(b.eps).c_str(),
                            format_number(b.eps2 - a.eps2).c_str());
            }
        }
    }
}
