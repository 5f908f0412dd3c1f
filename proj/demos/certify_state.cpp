// Builds one G_PLUS state both ways (closed form and quadrature recovery of
// Phi1, Phi3) and reports how well each satisfies the radial systems.

#include "dkp/dkp.hpp"

#include <cstdio>

int main()
{
    using namespace dkp;
    const int n = 1, m = -1;
    const PhysicalParams p{1.0, 0.5, 0.3, 0.0};
    const auto entry = branch_level(p, Branch::g_plus, n, m);
    const auto grid = default_grid(p.B, n, m);
    std::printf("G_PLUS n=%d m=%d  eps=%s  grid [%g, %g] x %zu\n", n, m, format_number(entry.eps).c_str(),
                grid.r_min(), grid.r_max(), grid.size());

    for (auto path : {RecoveryPath::analytic, RecoveryPath::quadrature}) {
        const auto s = assemble_state10(Branch::g_plus, n, m, p, entry, grid, {path});
        std::printf("\n%s path\n", std::string(to_string(path)).c_str());
        std::printf("  first-order system   %s\n", format_number(residual_first_order(s).max()).c_str());
        std::printf("  second-order system  %s\n", format_number(residual_second_order(s).max()).c_str());
        std::printf("  (F, G) chain         %s\n", format_number(chain_consistency(s)).c_str());
    }

    // the same level with polarizability, as a 15-component state
    PhysicalParams pol = p;
    pol.sigma = 0.1;
    const auto conv = CouplingConvention::first_order_consistent;
    const auto e15 = branch_level(pol, Branch::g_plus, n, m, conv);
    const auto s15 = assemble_state15(Branch::g_plus, n, m, pol, e15, grid, {RecoveryPath::analytic, conv});
    const auto [c_g, h_c] = polarizable_constraints(s15);
    std::printf("\nsigma=0.1: eps=%s  15-equation residual %s  constraints %s %s\n", format_number(e15.eps).c_str(),
                format_number(residual_first_order(s15).max()).c_str(), format_number(c_g).c_str(),
                format_number(h_c).c_str());
}
