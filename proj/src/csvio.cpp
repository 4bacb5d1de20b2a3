#include "bcov/csvio.hpp"
#include "bcov/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bcov {

namespace {

std::string trim(const std::string& s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

} // namespace

CsvData read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split_row(line));
    }
    if (rows.empty()) throw data_error(path + " contains no data");

    CsvData out;
    std::size_t first_data = 0;
    {
        double v;
        bool numeric = true;
        for (const std::string& cell : rows[0])
            if (!parse_double(cell, v)) { numeric = false; break; }
        if (!numeric) {
            out.header = rows[0];
            first_data = 1;
        }
    }
    if (first_data >= rows.size())
        throw data_error(path + " has a header but no data rows");

    const std::size_t cols = rows[first_data].size();
    out.values.resize(static_cast<Eigen::Index>(rows.size() - first_data),
                      static_cast<Eigen::Index>(cols));
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        if (rows[r].size() != cols) {
            std::ostringstream os;
            os << path << ": row " << r + 1 << " has " << rows[r].size()
               << " cells, expected " << cols;
            throw data_error(os.str());
        }
        for (std::size_t c = 0; c < cols; ++c) {
            double v;
            if (!parse_double(rows[r][c], v)) {
                std::ostringstream os;
                os << path << ": non-numeric cell at row " << r + 1
                   << ", column " << c + 1 << " ('" << rows[r][c] << "')";
                throw data_error(os.str());
            }
            out.values(static_cast<Eigen::Index>(r - first_data),
                       static_cast<Eigen::Index>(c)) = v;
        }
    }
    return out;
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path);
    if (!header.empty()) {
        if (static_cast<Eigen::Index>(header.size()) != m.cols())
            throw config_error("csv header width mismatch for " + path);
        for (std::size_t c = 0; c < header.size(); ++c)
            out << (c ? "," : "") << header[c];
        out << '\n';
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out << (c ? "," : "") << format_g17(m(r, c));
        out << '\n';
    }
}

void write_labels_csv(const std::string& path, const std::vector<int>& labels) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path);
    out << "label\n";
    for (int l : labels) out << l + 1 << '\n';
}

std::vector<int> read_labels_csv(const std::string& path) {
    CsvData csv = read_csv(path);
    if (csv.values.cols() != 1)
        throw data_error(path + ": expected a single label column");
    std::vector<int> out(csv.values.rows());
    for (Eigen::Index i = 0; i < csv.values.rows(); ++i) {
        double v = csv.values(i, 0);
        int l = static_cast<int>(v);
        if (l != v || l < 1)
            throw data_error(path + ": labels must be positive integers");
        out[i] = l - 1;
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path);
    out << content;
}

} // namespace bcov
