#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gin {

// N x m sample matrix with named columns. All entries finite, N >= 2,
// names unique; the constructor throws gin::DataError otherwise.
class DataMatrix {
public:
    DataMatrix(Eigen::MatrixXd values, std::vector<std::string> names);

    const Eigen::MatrixXd& values() const { return values_; }
    const std::vector<std::string>& names() const { return names_; }
    int rows() const { return static_cast<int>(values_.rows()); }
    int cols() const { return static_cast<int>(values_.cols()); }

    // Throws std::invalid_argument for an unknown name.
    int column_index(std::string_view name) const;
    std::vector<int> column_indices(std::span<const std::string> names) const;

    DataMatrix select(std::span<const int> columns) const;

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> names_;
};

}  // namespace gin
