#include "gin/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gin {

NoiseSpec NoiseSpec::uniform_power(double exponent) {
    NoiseSpec s;
    s.family = NoiseFamily::UniformPower;
    s.parameter = exponent;
    return s;
}

NoiseSpec NoiseSpec::uniform(double half_width) {
    NoiseSpec s;
    s.family = NoiseFamily::Uniform;
    s.parameter = half_width;
    return s;
}

NoiseSpec NoiseSpec::custom(std::vector<double> quantiles) {
    NoiseSpec s;
    s.family = NoiseFamily::Custom;
    s.parameter = 0.0;
    s.quantiles = std::move(quantiles);
    return s;
}

NoiseSpec NoiseSpec::gaussian(double sd) {
    NoiseSpec s;
    s.family = NoiseFamily::Gaussian;
    s.parameter = sd;
    return s;
}

namespace {

// E[Q(U)] and E[Q(U)^2] for a piecewise-linear quantile function, integrated
// exactly segment by segment.
std::pair<double, double> custom_moments(const std::vector<double>& q) {
    const auto segments = static_cast<double>(q.size() - 1);
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k + 1 < q.size(); ++k) {
        const double a = q[k];
        const double b = q[k + 1];
        m1 += 0.5 * (a + b);
        m2 += (a * a + a * b + b * b) / 3.0;
    }
    return {m1 / segments, m2 / segments};
}

}  // namespace

double NoiseSpec::mean() const {
    if (family == NoiseFamily::Custom && quantiles.size() >= 2)
        return scale * custom_moments(quantiles).first;
    return 0.0;
}

double NoiseSpec::variance() const {
    double base = 0.0;
    switch (family) {
        case NoiseFamily::UniformPower:
            base = 1.0 / (2.0 * parameter + 1.0);
            break;
        case NoiseFamily::Uniform:
            base = parameter * parameter / 3.0;
            break;
        case NoiseFamily::Custom: {
            if (quantiles.size() < 2) return 0.0;
            const auto [m1, m2] = custom_moments(quantiles);
            base = m2 - m1 * m1;
            break;
        }
        case NoiseFamily::Gaussian:
            base = parameter * parameter;
            break;
    }
    return scale * scale * base;
}

void NoiseSpec::validate() const {
    if (!std::isfinite(scale) || scale <= 0.0)
        throw std::invalid_argument("noise scale must be finite and positive");
    switch (family) {
        case NoiseFamily::UniformPower:
        case NoiseFamily::Uniform:
        case NoiseFamily::Gaussian:
            if (!std::isfinite(parameter) || parameter <= 0.0)
                throw std::invalid_argument("noise parameter must be finite and positive for " +
                                            family_name());
            break;
        case NoiseFamily::Custom: {
            if (quantiles.size() < 2)
                throw std::invalid_argument("custom noise needs at least two quantiles");
            for (std::size_t k = 0; k < quantiles.size(); ++k) {
                if (!std::isfinite(quantiles[k]))
                    throw std::invalid_argument("custom noise quantiles must be finite");
                if (k > 0 && quantiles[k] < quantiles[k - 1])
                    throw std::invalid_argument("custom noise quantiles must be non-decreasing");
            }
            const auto [m1, m2] = custom_moments(quantiles);
            const double spread = quantiles.back() - quantiles.front();
            if (spread <= 0.0) throw std::invalid_argument("custom noise has zero variance");
            if (std::abs(m1) > 1e-9 * spread)
                throw std::invalid_argument("custom noise must have zero mean");
            (void)m2;
            break;
        }
    }
}

std::string NoiseSpec::family_name() const {
    switch (family) {
        case NoiseFamily::UniformPower: return "uniform_power";
        case NoiseFamily::Uniform: return "uniform";
        case NoiseFamily::Custom: return "custom";
        case NoiseFamily::Gaussian: return "gaussian";
    }
    return "unknown";
}

NoiseFamily NoiseSpec::family_from_name(const std::string& name) {
    if (name == "uniform_power") return NoiseFamily::UniformPower;
    if (name == "uniform") return NoiseFamily::Uniform;
    if (name == "custom") return NoiseFamily::Custom;
    if (name == "gaussian") return NoiseFamily::Gaussian;
    throw std::invalid_argument("unknown noise family '" + name + "'");
}

std::vector<double> draw_noise(const NoiseSpec& spec, int n, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("draw_noise: n must be >= 1");
    if (spec.is_gaussian()) throw std::invalid_argument("Gaussian noise violates non-Gaussianity");
    spec.validate();

    std::vector<double> out(static_cast<std::size_t>(n));
    switch (spec.family) {
        case NoiseFamily::UniformPower: {
            const double p = spec.parameter;
            for (double& v : out) {
                const double u = rng.uniform(-1.0, 1.0);
                v = std::copysign(std::pow(std::abs(u), p), u);
            }
            break;
        }
        case NoiseFamily::Uniform:
            for (double& v : out) v = rng.uniform(-spec.parameter, spec.parameter);
            break;
        case NoiseFamily::Custom: {
            const auto& q = spec.quantiles;
            const auto segments = static_cast<double>(q.size() - 1);
            for (double& v : out) {
                const double pos = rng.uniform01() * segments;
                const auto k = std::min(static_cast<std::size_t>(pos), q.size() - 2);
                const double t = pos - static_cast<double>(k);
                v = q[k] + t * (q[k + 1] - q[k]);
            }
            break;
        }
        case NoiseFamily::Gaussian:
            break;
    }
    if (spec.scale != 1.0)
        for (double& v : out) v *= spec.scale;
    return out;
}

}  // namespace gin
