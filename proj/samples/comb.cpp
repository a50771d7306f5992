// Prepare a comb state with four rounds on both backends and print the
// fidelity to the ideal comb, the operation count and the backend agreement.

#include <cstdio>

#include "gkp/protocols.hpp"

int main() {
    using namespace gkp;
    const double Delta = 0.04;
    const int n = 4;
    auto g = run_comb(Delta, n, Backend::gauss);
    auto r = run_comb(Delta, n, Backend::grid);
    const auto sampled = to_grid(*g.gauss, r.grid->axes);
    const double agree = std::norm(inner(sampled, *r.grid));
    std::printf("comb L=%d Delta=%.3f: F(gauss)=%.10f F(grid)=%.10f overlap=%.12f ops=%d\n", 1 << n, Delta, g.report.fidelity,
                r.report.fidelity, agree, g.report.ops.total);
    for (const auto& v : g.report.verdicts) std::printf("  %s: %s\n", v.name.c_str(), to_string(v.verdict));
    return 0;
}
