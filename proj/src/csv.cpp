#include "delreg/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "delreg/errors.hpp"

namespace delreg {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace

NamedDataset ingest_csv(std::istream& in, const std::string& response_name) {
    std::string line;
    if (!std::getline(in, line)) fail(Errc::parse_error, "empty input");
    std::vector<std::string> header = split(line);
    if (header.size() < 2) fail(Errc::parse_error, "header needs at least two columns");

    int response = -1;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == response_name) response = static_cast<int>(j);
    if (response < 0)
        fail(Errc::missing_response_column, "no column named '" + response_name + "'");

    std::vector<std::vector<double>> values;
    std::vector<std::vector<std::uint8_t>> observed;
    long row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split(line);
        if (cells.size() != header.size())
            fail(Errc::parse_error, "row " + std::to_string(row) + " has " +
                                        std::to_string(cells.size()) + " cells, expected " +
                                        std::to_string(header.size()));
        std::vector<double> v(cells.size());
        std::vector<std::uint8_t> m(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const std::string& c = cells[j];
            if (c.empty() || c == "NA") {
                v[j] = 0.0;
                m[j] = 0;
                continue;
            }
            errno = 0;
            char* end = nullptr;
            const double x = std::strtod(c.c_str(), &end);
            if (end == c.c_str() || *end != '\0' || errno == ERANGE)
                fail(Errc::parse_error, "row " + std::to_string(row) + ", column " +
                                            std::to_string(j + 1) + ": cannot parse '" + c + "'");
            v[j] = x;
            m[j] = 1;
        }
        values.push_back(std::move(v));
        observed.push_back(std::move(m));
    }
    if (values.empty()) fail(Errc::empty_dataset, "no data rows");

    const long n = static_cast<long>(values.size());
    const int cols = static_cast<int>(header.size());
    Eigen::MatrixXd vm(n, cols);
    Mask mm(n, cols);
    for (long i = 0; i < n; ++i)
        for (int j = 0; j < cols; ++j) {
            vm(i, j) = values[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            mm(i, j) = observed[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    return NamedDataset{Dataset(std::move(vm), std::move(mm), response), std::move(header)};
}

NamedDataset ingest_csv_file(const std::string& path, const std::string& response_name) {
    std::ifstream in(path);
    if (!in) fail(Errc::parse_error, "cannot open '" + path + "'");
    return ingest_csv(in, response_name);
}

void write_csv(const Dataset& data, const std::vector<std::string>& header, std::ostream& out) {
    if (static_cast<int>(header.size()) != data.cols())
        fail(Errc::invalid_argument, "header length mismatch");
    for (std::size_t j = 0; j < header.size(); ++j)
        out << header[j] << (j + 1 < header.size() ? "," : "\n");
    char buf[40];
    for (long i = 0; i < data.rows(); ++i) {
        for (int j = 0; j < data.cols(); ++j) {
            if (data.observed(i, j)) {
                std::snprintf(buf, sizeof buf, "%.17g", data.value(i, j));
                out << buf;
            } else {
                out << "NA";
            }
            out << (j + 1 < data.cols() ? ',' : '\n');
        }
    }
}

}  // namespace delreg
