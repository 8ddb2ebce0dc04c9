#pragma once

#include <string>
#include <vector>

#include "gin/rng.hpp"

namespace gin {

enum class NoiseFamily {
    UniformPower,  // sign(u)|u|^p, u ~ U[-1, 1]
    Uniform,       // U[-r, r]
    Custom,        // piecewise-linear quantile function
    Gaussian,      // representable so that validation can reject it
};

// Per-variable noise distribution. Every non-Gaussian family here is
// symmetric or explicitly checked to have zero mean.
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::UniformPower;
    // UniformPower: exponent p. Uniform: half-width r. Gaussian: sd.
    double parameter = 5.0;
    // Custom only: values of the quantile function at probabilities k/K,
    // k = 0..K. Must be non-decreasing.
    std::vector<double> quantiles;
    // Multiplies every draw; used for the opt-in unit-variance rescaling.
    double scale = 1.0;

    static NoiseSpec uniform_power(double exponent = 5.0);
    static NoiseSpec uniform(double half_width);
    static NoiseSpec custom(std::vector<double> quantiles);
    static NoiseSpec gaussian(double sd);

    bool is_gaussian() const { return family == NoiseFamily::Gaussian; }
    double mean() const;
    double variance() const;
    // Throws std::invalid_argument on a malformed spec (bad parameters,
    // non-monotone table, nonzero mean, zero variance).
    void validate() const;

    std::string family_name() const;
    static NoiseFamily family_from_name(const std::string& name);

    bool operator==(const NoiseSpec&) const = default;
};

// n i.i.d. draws. Gaussian specs are refused.
std::vector<double> draw_noise(const NoiseSpec& spec, int n, RngStream& rng);

}  // namespace gin
