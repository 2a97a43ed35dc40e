// Regenerates the bundled synthetic assets: eleven portfolio files shaped
// like the published summary table, plus the synthetic PCT matrix variant.
// Outputs are deterministic; the fixture tests guard the exact bytes.

#include "concrisk/csv.hpp"
#include "concrisk/portfolio.hpp"
#include "concrisk/ratings.hpp"
#include "concrisk/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <exception>
#include <string>

using namespace concrisk;

int main(int argc, char** argv) {
    const std::string dir = (argc > 1) ? argv[1] : "fixtures";
    try {
        const TransitionMatrix tm = load_transition_matrix(dir + "/transition_matrix.csv");

        for (const auto& spec : mdb_portfolio_specs()) {
            const Portfolio p = generate_synthetic(spec, tm);
            std::string base = spec.name;
            std::transform(base.begin(), base.end(), base.begin(),
                           [](unsigned char c) { return char(std::tolower(c)); });
            const std::string path = dir + "/portfolio_" + base + ".csv";
            write_text_atomic(path, synthetic_fixture_csv(p, spec));
            std::printf("%-40s N=%-3zu avg_pd=%.4f avg_mat=%.4f top10=%.3f\n", path.c_str(),
                        p.size(), p.weighted_pd(tm), p.weighted_maturity(),
                        top_fraction_share(p, 0.10));
        }

        const std::string pct_path = dir + "/transition_matrix_pct.csv";
        std::string pct =
            "# synthetic PCT-adjusted variant: every grade takes the transition row of the\n"
            "# grade two notches better; an illustrative stand-in, not published data.\n"
            "# regenerate with gen_fixtures; do not edit by hand\n";
        pct += transition_matrix_csv(pct_uplift(tm, 2));
        write_text_atomic(pct_path, pct);
        std::printf("%s\n", pct_path.c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "gen_fixtures: %s\n", e.what());
        return 1;
    }
    return 0;
}
