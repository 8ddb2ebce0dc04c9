#include "gin/data_matrix.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "gin/error.hpp"

namespace gin {

DataMatrix::DataMatrix(Eigen::MatrixXd values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
    if (static_cast<Eigen::Index>(names_.size()) != values_.cols())
        throw DataError("data has " + std::to_string(values_.cols()) + " columns but " +
                        std::to_string(names_.size()) + " names");
    if (values_.rows() < 2) throw DataError("data has fewer than 2 rows");
    std::set<std::string> seen;
    for (const auto& n : names_)
        if (!seen.insert(n).second) throw DataError("duplicate column name '" + n + "'");
    for (Eigen::Index j = 0; j < values_.cols(); ++j)
        for (Eigen::Index i = 0; i < values_.rows(); ++i)
            if (!std::isfinite(values_(i, j)))
                throw DataError("non-finite value at row " + std::to_string(i + 1) + ", column '" +
                                names_[static_cast<std::size_t>(j)] + "'");
}

int DataMatrix::column_index(std::string_view name) const {
    for (std::size_t j = 0; j < names_.size(); ++j)
        if (names_[j] == name) return static_cast<int>(j);
    throw std::invalid_argument("unknown column '" + std::string(name) + "'");
}

std::vector<int> DataMatrix::column_indices(std::span<const std::string> names) const {
    std::vector<int> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(column_index(n));
    return out;
}

DataMatrix DataMatrix::select(std::span<const int> columns) const {
    Eigen::MatrixXd v(values_.rows(), static_cast<Eigen::Index>(columns.size()));
    std::vector<std::string> n;
    for (std::size_t k = 0; k < columns.size(); ++k) {
        const int c = columns[k];
        if (c < 0 || c >= cols()) throw std::invalid_argument("column index out of range");
        v.col(static_cast<Eigen::Index>(k)) = values_.col(c);
        n.push_back(names_[static_cast<std::size_t>(c)]);
    }
    return DataMatrix(std::move(v), std::move(n));
}

}  // namespace gin
