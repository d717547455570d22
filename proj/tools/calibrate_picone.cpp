#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyperlap/identities.hpp"
#include "hyperlap/io.hpp"

using namespace hyperlap;

namespace {

struct Range {
    std::string name;
    std::vector<double> ps;
};

// Largest dyadic C whose doubled value still passes both the pointwise sweep and the Monte Carlo pairs.
double calibrate(const Range& r, std::size_t pairs, std::uint64_t seed, double margin, io::Json& log)
{
    double inf = std::numeric_limits<double>::infinity();
    for (double p : r.ps)
        inf = std::min(inf, picone_pointwise_infimum(p));
    log["pointwise_infimum"] = io::num(inf);
    for (int k = 4; k >= -20; --k) {
        const double C = std::ldexp(1.0, k);
        if (margin * C > inf)
            continue;
        bool ok = true;
        for (double p : r.ps)
            ok = ok && picone_monte_carlo(p, margin * C, pairs, seed).failures == 0;
        if (ok)
            return C;
    }
    return 0.0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Picone constant calibration"};
    std::uint64_t seed = picone_calibration::kSeed;
    std::size_t pairs = 1000;
    double margin = picone_calibration::kMargin;
    std::string out = "data/picone_calibration.json";
    app.add_option("--seed", seed);
    app.add_option("--pairs", pairs);
    app.add_option("--margin", margin);
    app.add_option("--out", out);
    CLI11_PARSE(app, argc, argv);

    std::vector<Range> ranges = {{"p<2", {1.25, 1.5, 1.75, 1.9, 1.99}}, {"p>=2", {2.0, 2.5, 3.0, 3.5, 4.0}}};
    io::Json j{{"seed", seed}, {"pairs", pairs}, {"margin", io::num(margin)}};
    io::Json rows = io::Json::array();
    for (const auto& r : ranges) {
        io::Json row{{"range", r.name}, {"p_grid", r.ps}};
        row["constant"] = io::num(calibrate(r, pairs, seed, margin, row));
        std::cout << r.name << " C_p = " << io::fmt(row["constant"].get<double>()) << "\n";
        rows.push_back(row);
    }
    j["ranges"] = rows;
    io::write_json(out, j);
    return 0;
}
