#include "gin/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "gin/rng.hpp"

namespace gin::kernel {

namespace {

// Squared distances from row j to every row, single precision.
void squared_distances(const Eigen::MatrixXf& x, Eigen::Index j, Eigen::VectorXf& out) {
    out.setZero(x.rows());
    for (Eigen::Index d = 0; d < x.cols(); ++d)
        out.array() += (x.col(d).array() - x(j, d)).square();
}

// Unnormalized column j of the kernel matrix.
void kernel_column(const Eigen::MatrixXf& x, float scale, Eigen::Index j, Eigen::VectorXf& out) {
    squared_distances(x, j, out);
    out = (out.array() * -scale).exp().matrix();
}

float exponent_scale(double sigma) { return static_cast<float>(1.0 / (2.0 * sigma * sigma)); }

std::vector<int> shuffled(int n, RngStream& rng) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    return perm;
}

// Row means (and grand mean) of an implicit kernel matrix.
struct KernelMeans {
    Eigen::VectorXd row;
    double grand = 0.0;
    double off_diagonal = 0.0;
};

KernelMeans kernel_means(const Eigen::MatrixXf& x, float scale) {
    const Eigen::Index n = x.rows();
    KernelMeans m;
    m.row.resize(n);
    Eigen::VectorXf col;
    for (Eigen::Index j = 0; j < n; ++j) {
        kernel_column(x, scale, j, col);
        m.row(j) = col.cast<double>().sum() / static_cast<double>(n);
    }
    m.grand = m.row.mean();
    const double nn = static_cast<double>(n);
    m.off_diagonal = (m.grand * nn * nn - nn) / (nn * (nn - 1.0));
    return m;
}

void centered_column(const Eigen::MatrixXf& x, float scale, const KernelMeans& m, Eigen::Index j,
                     Eigen::VectorXf& out) {
    kernel_column(x, scale, j, out);
    out.array() -= (m.row.cast<float>().array() + static_cast<float>(m.row(j) - m.grand));
}

}  // namespace

bool standardize(Eigen::MatrixXd& x) {
    bool any = false;
    const double n = static_cast<double>(x.rows());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        auto col = x.col(c);
        col.array() -= col.mean();
        const double scale = col.cwiseAbs().maxCoeff();
        const double sd = std::sqrt(col.squaredNorm() / std::max(1.0, n - 1.0));
        if (!(sd > 1e-12 * std::max(scale, 1e-300)) || scale == 0.0) {
            col.setZero();
            continue;
        }
        col /= sd;
        any = true;
    }
    return any;
}

double median_bandwidth(const Eigen::MatrixXd& x) {
    const Eigen::Index m = std::min<Eigen::Index>(x.rows(), 100);
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double s = (x.row(i) - x.row(j)).squaredNorm();
            if (s > 0.0) d.push_back(s);
        }
    if (d.empty()) return 1.0;
    const std::size_t mid = d.size() / 2;
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
    double med = d[mid];
    if (d.size() % 2 == 0) {
        const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
        med = 0.5 * (med + lower);
    }
    return std::sqrt(0.5 * med);
}

double bandwidth(const Eigen::MatrixXd& standardized, const KernelWidth& width) {
    return width.mode == KernelWidth::Mode::Fixed ? width.value : median_bandwidth(standardized);
}

CenteredGram::CenteredGram(const Eigen::MatrixXd& standardized, double sigma) {
    const Eigen::MatrixXf x = standardized.cast<float>();
    const Eigen::Index n = x.rows();
    const float scale = exponent_scale(sigma);
    kc_.resize(n, n);
    Eigen::VectorXf col;
    Eigen::VectorXd row_mean(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        kernel_column(x, scale, j, col);
        kc_.col(j) = col;
        row_mean(j) = col.cast<double>().sum() / static_cast<double>(n);
    }
    const double grand = row_mean.mean();
    const double nn = static_cast<double>(n);
    off_mean_ = (grand * nn * nn - nn) / (nn * (nn - 1.0));
    const Eigen::VectorXf rm = row_mean.cast<float>();
    for (Eigen::Index j = 0; j < n; ++j)
        kc_.col(j).array() -= (rm.array() + static_cast<float>(row_mean(j) - grand));
}

HsicResult gamma_from_sums(int n, double sum_prod, double sum_sq_offdiag, double mu_x, double mu_y) {
    const double m = static_cast<double>(n);
    HsicResult r;
    r.statistic = sum_prod / m;
    double var = sum_sq_offdiag / 36.0 / (m * (m - 1.0));
    var *= 72.0 * (m - 4.0) * (m - 5.0) / (m * (m - 1.0) * (m - 2.0) * (m - 3.0));
    // Written so that swapping the arguments gives the same bits.
    const double mean = (1.0 + mu_x * mu_y - (mu_x + mu_y)) / m;
    if (!(var > 0.0) || !(mean > 0.0)) {
        r.p_value = 1.0;
        r.degenerate = true;
        return r;
    }
    const double shape = mean * mean / var;
    const double scale = var * m / mean;
    r.p_value = r.statistic <= 0.0 ? 1.0 : boost::math::gamma_q(shape, r.statistic / scale);
    return r;
}

HsicResult gamma_test(const CenteredGram& a, const CenteredGram& b) {
    const Eigen::Index n = a.size();
    if (b.size() != n) throw std::invalid_argument("HSIC arguments differ in length");
    double sum = 0.0, sq = 0.0;
    Eigen::VectorXf prod;
    for (Eigen::Index j = 0; j < n; ++j) {
        prod = a.matrix().col(j).cwiseProduct(b.matrix().col(j));
        const double d = prod(j);
        sum += static_cast<double>(prod.sum());
        sq += static_cast<double>(prod.squaredNorm()) - d * d;
    }
    return gamma_from_sums(static_cast<int>(n), sum, sq, a.off_diagonal_mean(), b.off_diagonal_mean());
}

HsicResult permutation_test(const CenteredGram& a, const CenteredGram& b, int permutations,
                            std::uint64_t seed) {
    const Eigen::Index n = a.size();
    if (b.size() != n) throw std::invalid_argument("HSIC arguments differ in length");
    const auto& ka = a.matrix();
    const auto& kb = b.matrix();
    auto stat = [&](const std::vector<int>* perm) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            double col = 0.0;
            if (perm == nullptr) {
                col = ka.col(j).dot(kb.col(j));
            } else {
                const int pj = (*perm)[static_cast<std::size_t>(j)];
                for (Eigen::Index i = 0; i < n; ++i)
                    col += ka(i, j) * kb((*perm)[static_cast<std::size_t>(i)], pj);
            }
            s += col;
        }
        return s / static_cast<double>(n);
    };
    HsicResult r;
    r.statistic = stat(nullptr);
    RngStream rng(seed, {stream::kPermutation});
    int exceed = 0;
    for (int p = 0; p < permutations; ++p) {
        const auto perm = shuffled(static_cast<int>(n), rng);
        if (stat(&perm) >= r.statistic) ++exceed;
    }
    r.p_value = (1.0 + exceed) / (1.0 + permutations);
    return r;
}

HsicResult streamed_gamma_test(const Eigen::MatrixXd& x, double sigma_x, const Eigen::MatrixXd& y,
                               double sigma_y) {
    const Eigen::Index n = x.rows();
    if (y.rows() != n) throw std::invalid_argument("HSIC arguments differ in length");
    const Eigen::MatrixXf xf = x.cast<float>(), yf = y.cast<float>();
    const float sx = exponent_scale(sigma_x), sy = exponent_scale(sigma_y);
    const auto mx = kernel_means(xf, sx);
    const auto my = kernel_means(yf, sy);
    double sum = 0.0, sq = 0.0;
    Eigen::VectorXf kx, ky;
    for (Eigen::Index j = 0; j < n; ++j) {
        centered_column(xf, sx, mx, j, kx);
        centered_column(yf, sy, my, j, ky);
        kx.array() *= ky.array();
        const double d = kx(j);
        sum += static_cast<double>(kx.sum());
        sq += static_cast<double>(kx.squaredNorm()) - d * d;
    }
    return gamma_from_sums(static_cast<int>(n), sum, sq, mx.off_diagonal, my.off_diagonal);
}

HsicResult streamed_permutation_test(const Eigen::MatrixXd& x, double sigma_x,
                                     const Eigen::MatrixXd& y, double sigma_y, int permutations,
                                     std::uint64_t seed) {
    const Eigen::Index n = x.rows();
    if (y.rows() != n) throw std::invalid_argument("HSIC arguments differ in length");
    const Eigen::MatrixXf xf = x.cast<float>();
    const float sx = exponent_scale(sigma_x), sy = exponent_scale(sigma_y);
    const auto mx = kernel_means(xf, sx);
    // Permuting y's rows permutes both indices of its centered Gram matrix.
    auto stat = [&](const Eigen::MatrixXf& yp) {
        const auto my = kernel_means(yp, sy);
        Eigen::VectorXf kx, ky;
        double s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            centered_column(xf, sx, mx, j, kx);
            centered_column(yp, sy, my, j, ky);
            s += static_cast<double>(kx.dot(ky));
        }
        return s / static_cast<double>(n);
    };
    const Eigen::MatrixXf yf = y.cast<float>();
    HsicResult r;
    r.statistic = stat(yf);
    RngStream rng(seed, {stream::kPermutation});
    int exceed = 0;
    Eigen::MatrixXf yp(yf.rows(), yf.cols());
    for (int p = 0; p < permutations; ++p) {
        const auto perm = shuffled(static_cast<int>(n), rng);
        for (Eigen::Index i = 0; i < n; ++i) yp.row(i) = yf.row(perm[static_cast<std::size_t>(i)]);
        if (stat(yp) >= r.statistic) ++exceed;
    }
    r.p_value = (1.0 + exceed) / (1.0 + permutations);
    return r;
}

}  // namespace gin::kernel
