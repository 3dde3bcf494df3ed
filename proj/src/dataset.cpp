#include "zipper/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace zipper {

void Dataset::validate() const {
    if (x.rows() != y.size()) {
        throw DomainError("dataset: response has " + std::to_string(y.size()) +
                          " rows but covariates have " + std::to_string(x.rows()));
    }
    if (!columns.empty() && columns.size() != p()) {
        throw DomainError("dataset: column name count does not match covariate count");
    }
    if (!y.allFinite() || !x.allFinite()) throw DomainError("dataset: non-finite entry");
    if (response_type == ResponseType::binary) {
        for (auto v : y) {
            if (v != 0.0 && v != 1.0) throw DomainError("dataset: binary response must be 0/1");
        }
    }
}

std::size_t Dataset::column_index(std::string_view key) const {
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] == key) return j;
    }
    std::size_t idx = 0;
    const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
    if (ec == std::errc() && ptr == key.data() + key.size() && idx < p()) return idx;
    throw ConfigError("unknown covariate '" + std::string(key) + "'");
}

ResponseType detect_response_type(const Vector& y) {
    if (y.size() == 0) return ResponseType::continuous;
    for (auto v : y) {
        if (v != 0.0 && v != 1.0) return ResponseType::continuous;
    }
    return ResponseType::binary;
}

Dataset make_dataset(Vector y, Matrix x, std::vector<std::string> columns) {
    Dataset d;
    if (columns.empty()) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) columns.push_back("x" + std::to_string(j));
    }
    d.response_type = detect_response_type(y);
    d.y = std::move(y);
    d.x = std::move(x);
    d.columns = std::move(columns);
    d.validate();
    return d;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    out.push_back(cell);
    for (auto& s : out) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }
    return out;
}

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "null";
}

std::optional<double> parse_number(const std::string& cell) {
    double v = 0.0;
    const char* first = cell.data();
    if (!cell.empty() && cell.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

}  // namespace

Dataset ingest_csv(const std::filesystem::path& path, std::string_view response,
                   std::span<const std::string> features, NaPolicy na_policy, bool no_features) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw IngestionError("'" + path.string() + "' is empty");
    const auto header = split_line(line);
    auto find = [&](std::string_view name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw IngestionError("column '" + std::string(name) + "' not found in header");
        }
        return static_cast<std::size_t>(it - header.begin());
    };

    const std::size_t ycol = find(response);
    std::vector<std::size_t> xcols;
    std::vector<std::string> names;
    if (!no_features) {
        if (features.empty()) {
            for (std::size_t j = 0; j < header.size(); ++j) {
                if (j != ycol) {
                    xcols.push_back(j);
                    names.push_back(header[j]);
                }
            }
        } else {
            for (const auto& f : features) {
                xcols.push_back(find(f));
                names.push_back(f);
            }
        }
    }

    std::vector<double> ys;
    std::vector<std::vector<double>> rows;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size()) {
            throw ParseError(row, 0, "row " + std::to_string(row) + " has " +
                                         std::to_string(cells.size()) + " fields, expected " +
                                         std::to_string(header.size()));
        }
        bool drop = false;
        auto read = [&](std::size_t col) -> double {
            const auto& cell = cells[col];
            if (is_missing(cell)) {
                if (na_policy == NaPolicy::drop_rows) {
                    drop = true;
                    return 0.0;
                }
                throw ParseError(row, col, "missing value at row " + std::to_string(row) +
                                               ", column '" + header[col] + "'");
            }
            const auto v = parse_number(cell);
            if (!v) {
                throw ParseError(row, col, "non-numeric value '" + cell + "' at row " +
                                               std::to_string(row) + ", column '" + header[col] +
                                               "'");
            }
            return *v;
        };
        const double yv = read(ycol);
        std::vector<double> xv;
        xv.reserve(xcols.size());
        for (auto c : xcols) xv.push_back(read(c));
        if (drop) continue;
        ys.push_back(yv);
        rows.push_back(std::move(xv));
    }
    if (ys.empty()) throw IngestionError("'" + path.string() + "' has no usable rows");

    const auto n = static_cast<Eigen::Index>(ys.size());
    const auto p = static_cast<Eigen::Index>(xcols.size());
    Dataset d;
    d.y = Eigen::Map<Vector>(ys.data(), n);
    d.x.resize(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) d.x(i, j) = rows[i][j];
    }
    d.columns = std::move(names);
    d.response_name = std::string(response);
    d.response_type = detect_response_type(d.y);
    d.validate();
    return d;
}

}  // namespace zipper
