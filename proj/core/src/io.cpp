#include "qmiset/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace qmiset {

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) {
        throw std::invalid_argument("parse_double: cannot parse '" + s + "'");
    }
    return v;
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array()) {
        throw std::invalid_argument("matrix_from_json: expected an array of arrays");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Matrix(0, 0);
    if (!j[0].is_array()) {
        throw std::invalid_argument("matrix_from_json: expected an array of arrays");
    }
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw std::invalid_argument("matrix_from_json: ragged rows");
        }
        for (Eigen::Index k = 0; k < cols; ++k) {
            m(i, k) = row[static_cast<size_t>(k)].get<double>();
        }
    }
    require_finite(m, "matrix_from_json");
    return m;
}

void write_matrix_csv(const Matrix& m, std::ostream& os) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) os << ',';
            os << format_double(m(i, j));
        }
        os << '\n';
    }
}

Matrix read_matrix_csv(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            row.push_back(parse_double(cell));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::invalid_argument("read_matrix_csv: ragged rows");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return Matrix(0, 0);
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
        }
    }
    return m;
}

void save_json(const Json& j, const std::string& path) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("save_json: cannot open '" + path + "' for writing");
    }
    os << j.dump(2) << '\n';
}

Json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("load_json: cannot open '" + path + "'");
    }
    Json j;
    is >> j;
    return j;
}

}  // namespace qmiset
