#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mtfl::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws DataError when absent.
    std::size_t column(const std::string &name) const;
};

/// Reads a UTF-8 CSV with a header row. Handles quoted fields with
/// embedded commas/quotes; CRLF tolerated. Throws DataError on ragged
/// rows or unreadable files.
Table read_file(const std::filesystem::path &path);

Table read_string(const std::string &text, const std::string &origin = "<string>");

/// Formats one field, quoting only when needed.
std::string escape(const std::string &field);

/// Canonical float formatting for emitted artifacts ("%.12g"); keeps
/// re-runs byte-identical.
std::string format_number(double v);

class Writer {
  public:
    explicit Writer(const std::filesystem::path &path);
    ~Writer();

    Writer(const Writer &) = delete;
    Writer &operator=(const Writer &) = delete;

    void row(const std::vector<std::string> &fields);

  private:
    struct Impl;
    Impl *impl_;
};

double parse_double(const std::string &s, const std::string &context);
long long parse_int(const std::string &s, const std::string &context);

} // namespace mtfl::csv
