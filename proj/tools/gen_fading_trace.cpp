// Fixture generator for the bundled fading traces.
//
// Produces a slot-sampled wideband-effective channel gain: a Rayleigh
// envelope from the improved-Jakes sum-of-sinusoids model (Zheng &
// Xiao) at the requested maximum Doppler, plus a per-sample Gaussian
// component that stands in for the frequency selectivity of the EPA
// profile (43 ns delay spread -> coherence bandwidth below the 10 MHz
// system bandwidth, so the per-TTI effective gain jitters sample to
// sample). Gains are normalized to 0 dB mean power and clamped.
//
// The shipped fixtures were generated with:
//   gen_fading_trace --doppler-hz 5.364823 --seed 101 --out data/fading_epa_low.csv
//   gen_fading_trace --doppler-hz 17.882742 --seed 202 --out data/fading_epa_high.csv
// (Doppler = v / lambda at 1930 MHz for 3 and 10 km/h.)

#include "d2dsim/rng.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <vector>

namespace {

struct Params {
    double doppler_hz = 5.364823;
    double duration_s = 12.0;
    double sample_period_s = 1e-3;
    double jitter_db = 1.7;
    double clamp_lo_db = -16.0;
    double clamp_hi_db = 8.0;
    unsigned sinusoids = 16;
    std::uint64_t seed = 101;
    std::string out;
};

double uniform(std::uint64_t seed, std::uint64_t n) {
    return d2dsim::draw_uniform(seed, n, d2dsim::DrawPurpose::d2d_access);
}

// Box-Muller from two counter draws.
double gaussian(std::uint64_t seed, std::uint64_t n) {
    const double u1 = std::max(uniform(seed, 2 * n), 1e-300);
    const double u2 = uniform(seed, 2 * n + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace

int main(int argc, char** argv) {
    Params p;
    CLI::App app{"Generate a synthetic EPA-style fading trace (CSV t_s,gain_db)"};
    app.add_option("--doppler-hz", p.doppler_hz, "Maximum Doppler frequency");
    app.add_option("--duration-s", p.duration_s, "Trace length in seconds");
    app.add_option("--sample-period-s", p.sample_period_s, "Sample spacing");
    app.add_option("--jitter-db", p.jitter_db, "Per-sample frequency-selectivity jitter stddev");
    app.add_option("--clamp-lo-db", p.clamp_lo_db, "Lower gain clamp");
    app.add_option("--clamp-hi-db", p.clamp_hi_db, "Upper gain clamp");
    app.add_option("--sinusoids", p.sinusoids, "Sum-of-sinusoids order");
    app.add_option("--seed", p.seed, "Generator seed");
    app.add_option("--out", p.out, "Output CSV path")->required();
    CLI11_PARSE(app, argc, argv);

    const unsigned m = p.sinusoids;
    const double pi = std::numbers::pi;
    const double theta = (uniform(p.seed, 1'000'000) * 2.0 - 1.0) * pi;
    std::vector<double> alpha(m), phi(m), psi(m);
    for (unsigned k = 0; k < m; ++k) {
        alpha[k] = (2.0 * pi * (k + 1) - pi + theta) / (4.0 * m);
        phi[k] = (uniform(p.seed, 1'000'100 + k) * 2.0 - 1.0) * pi;
        psi[k] = (uniform(p.seed, 1'000'200 + k) * 2.0 - 1.0) * pi;
    }

    const auto samples = static_cast<std::size_t>(std::llround(p.duration_s / p.sample_period_s));
    std::ofstream out(p.out);
    if (!out) {
        std::cerr << "cannot write " << p.out << "\n";
        return 2;
    }
    out << "t_s,gain_db\n";
    char buf[80];
    const double scale = std::sqrt(2.0 / m);
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) * p.sample_period_s;
        double xc = 0.0, xs = 0.0;
        for (unsigned k = 0; k < m; ++k) {
            xc += std::cos(2.0 * pi * p.doppler_hz * std::cos(alpha[k]) * t + phi[k]);
            xs += std::cos(2.0 * pi * p.doppler_hz * std::sin(alpha[k]) * t + psi[k]);
        }
        xc *= scale;
        xs *= scale;
        const double power = (xc * xc + xs * xs) / 2.0; // unit mean
        double gain_db = 10.0 * std::log10(std::max(power, 1e-12)) +
                         p.jitter_db * gaussian(p.seed, 2'000'000 + i);
        gain_db = std::clamp(gain_db, p.clamp_lo_db, p.clamp_hi_db);
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", t, gain_db);
        out << buf << '\n';
    }
    return 0;
}
