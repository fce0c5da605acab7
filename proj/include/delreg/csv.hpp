#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "delreg/dataset.hpp"

namespace delreg {

/// Dataset plus the column names from a CSV header.
struct NamedDataset {
    Dataset data;
    std::vector<std::string> header;
};

/// First row is a header; cells are decimal numbers, the empty string or the
/// literal NA (both meaning missing). Parse failures report 1-based row and
/// column.
NamedDataset ingest_csv(std::istream& in, const std::string& response_name);
NamedDataset ingest_csv_file(const std::string& path, const std::string& response_name);

/// Values at full round-trip precision; masked cells come out as NA.
void write_csv(const Dataset& data, const std::vector<std::string>& header, std::ostream& out);

}  // namespace delreg
