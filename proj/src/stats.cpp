#include "gin/stats.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "gin/error.hpp"
#include "gin/kernel.hpp"

namespace gin {

void TestConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (kernel_width.mode == KernelWidth::Mode::Fixed && !(kernel_width.value > 0.0))
        throw std::invalid_argument("fixed kernel width must be positive");
    if (pvalue_method == PValueMethod::Permutation && permutations < 1)
        throw std::invalid_argument("permutation count must be positive");
    if (!(svd_tolerance > 0.0 && svd_tolerance < 1.0))
        throw std::invalid_argument("svd tolerance must lie in (0, 1)");
    if (gram_materialize_limit < 0) throw std::invalid_argument("gram limit must be >= 0");
}

namespace {

void check_indices(const DataMatrix& data, std::span<const int> cols, const char* what) {
    if (cols.empty()) throw std::invalid_argument(std::string(what) + " index set is empty");
    for (int c : cols)
        if (c < 0 || c >= data.cols())
            throw std::invalid_argument(std::string(what) + " column " + std::to_string(c) +
                                        " out of range");
}

}  // namespace

Eigen::MatrixXd cross_covariance(const DataMatrix& data, std::span<const int> y_cols,
                                 std::span<const int> z_cols, bool allow_overlap) {
    check_indices(data, y_cols, "Y");
    check_indices(data, z_cols, "Z");
    if (!allow_overlap) {
        const std::set<int> ys(y_cols.begin(), y_cols.end());
        for (int z : z_cols)
            if (ys.count(z)) throw std::invalid_argument("Y and Z overlap in column " + std::to_string(z));
    }
    const auto& v = data.values();
    const double denom = static_cast<double>(data.rows() - 1);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(y_cols.size()), static_cast<Eigen::Index>(z_cols.size()));
    for (std::size_t i = 0; i < y_cols.size(); ++i) {
        const Eigen::VectorXd y = v.col(y_cols[i]).array() - v.col(y_cols[i]).mean();
        for (std::size_t j = 0; j < z_cols.size(); ++j) {
            const double zbar = v.col(z_cols[j]).mean();
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                y.dot((v.col(z_cols[j]).array() - zbar).matrix()) / denom;
        }
    }
    return out;
}

Eigen::VectorXd canonical_direction(Eigen::VectorXd v) {
    const double norm = v.norm();
    if (!(norm > 0.0)) throw NumericalError("cannot canonicalize a zero vector");
    v /= norm;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-12) {
            if (v(i) < 0.0) v = -v;
            break;
        }
    }
    return v;
}

OmegaSolution omega_from_cross_covariance(const Eigen::MatrixXd& cross, double svd_tolerance) {
    const Eigen::Index rows = cross.rows();
    if (rows < 1 || cross.cols() < 1) throw std::invalid_argument("empty cross-covariance");
    if (!cross.allFinite()) throw NumericalError("non-finite cross-covariance");
    OmegaSolution sol;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    if (!(smax > 0.0)) {
        sol.omega = Eigen::VectorXd::Unit(rows, 0);
        sol.null_dim = static_cast<int>(rows);
        sol.degenerate = true;
        return sol;
    }
    sol.null_dim = static_cast<int>(rows - s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) <= svd_tolerance * smax) ++sol.null_dim;
    sol.omega = canonical_direction(svd.matrixU().col(rows - 1));
    sol.residual_singular_value = (sol.omega.transpose() * cross).norm();
    return sol;
}

OmegaSolution estimate_omega(const DataMatrix& data, std::span<const int> y_cols,
                             std::span<const int> z_cols, const TestConfig& config,
                             bool allow_overlap) {
    if (y_cols.size() < 2)
        throw std::invalid_argument("GIN undefined for scalar Y unless cov(Y,Z)=0");
    return omega_from_cross_covariance(cross_covariance(data, y_cols, z_cols, allow_overlap),
                                       config.svd_tolerance);
}

HsicResult hsic_test(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const TestConfig& config) {
    if (x.rows() != y.rows()) throw std::invalid_argument("HSIC arguments differ in length");
    const int n = static_cast<int>(x.rows());
    const bool gamma = config.pvalue_method == PValueMethod::Gamma;
    if (gamma && n < 20) throw std::invalid_argument("gamma approximation needs N >= 20");
    if (n < 2) throw std::invalid_argument("HSIC needs at least two samples");
    Eigen::MatrixXd xs = x, ys = y;
    if (!kernel::standardize(xs) || !kernel::standardize(ys)) return {1.0, 0.0, true};
    const double sx = kernel::bandwidth(xs, config.kernel_width);
    const double sy = kernel::bandwidth(ys, config.kernel_width);
    if (n > config.gram_materialize_limit) {
        return gamma ? kernel::streamed_gamma_test(xs, sx, ys, sy)
                     : kernel::streamed_permutation_test(xs, sx, ys, sy, config.permutations,
                                                         config.permutation_seed);
    }
    const kernel::CenteredGram kx(xs, sx), ky(ys, sy);
    return gamma ? kernel::gamma_test(kx, ky)
                 : kernel::permutation_test(kx, ky, config.permutations, config.permutation_seed);
}

double hsic_pvalue(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const TestConfig& config) {
    return hsic_test(x, y, config).p_value;
}

FisherResult fisher_combine(std::span<const double> pvals) {
    if (pvals.empty()) throw std::invalid_argument("Fisher combination of an empty list");
    FisherResult r;
    double t = 0.0;
    for (double p : pvals) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p-value outside [0, 1]");
        if (p == 0.0) {
            p = std::numeric_limits<double>::min();
            r.clamped = true;
        }
        t += -2.0 * std::log(p);
    }
    r.statistic = t;
    r.p_value = boost::math::gamma_q(static_cast<double>(pvals.size()), t / 2.0);
    return r;
}

Eigen::VectorXd ols_coefficients(const DataMatrix& data, std::span<const int> z_cols, int y_col) {
    const int y[] = {y_col};
    const Eigen::MatrixXd szz = cross_covariance(data, z_cols, z_cols, true);
    const Eigen::VectorXd szy = cross_covariance(data, z_cols, y, false).col(0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(szz);
    const auto& s = svd.singularValues();
    if (!(s(s.size() - 1) > 0.0) || s(0) / s(s.size() - 1) > 1e12)
        throw NumericalError("Z covariance is singular (condition number above 1e12)");
    return szz.ldlt().solve(szy);
}

Eigen::VectorXd ols_residual(const DataMatrix& data, std::span<const int> z_cols, int y_col) {
    const Eigen::VectorXd beta = ols_coefficients(data, z_cols, y_col);
    const auto& v = data.values();
    Eigen::VectorXd r = v.col(y_col).array() - v.col(y_col).mean();
    for (std::size_t j = 0; j < z_cols.size(); ++j)
        r -= beta(static_cast<Eigen::Index>(j)) * (v.col(z_cols[j]).array() - v.col(z_cols[j]).mean()).matrix();
    return r;
}

}  // namespace gin
