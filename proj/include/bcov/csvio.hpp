#pragma once

#include <string>
#include <vector>
#include <Eigen/Dense>

namespace bcov {

struct CsvData {
    Eigen::MatrixXd values;
    std::vector<std::string> header; // empty when the file had none
};

// Comma-separated, '.' decimal, row = observation. A single leading header
// row is auto-detected by any non-numeric cell.
CsvData read_csv(const std::string& path);

// %.17g cells so a write/read round trip is exact
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {});

// one integer per line (1-based labels in files)
void write_labels_csv(const std::string& path, const std::vector<int>& labels);
std::vector<int> read_labels_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string format_g17(double v);

} // namespace bcov
