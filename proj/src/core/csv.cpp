#include "mtfl/core/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mtfl/core/error.hpp"

namespace mtfl::csv {

std::size_t Table::column(const std::string &name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    throw DataError("csv: missing column '" + name + "'");
}

namespace {

std::vector<std::string> split_record(const std::string &line, const std::string &origin,
                                      std::size_t lineno) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!cur.empty())
                throw DataError(origin + ":" + std::to_string(lineno) +
                                ": stray quote inside unquoted field");
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted)
        throw DataError(origin + ":" + std::to_string(lineno) + ": unterminated quoted field");
    fields.push_back(cur);
    return fields;
}

Table parse(std::istream &in, const std::string &origin) {
    Table t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() && t.header.empty())
            continue;
        auto fields = split_record(line, origin, lineno);
        if (t.header.empty()) {
            t.header = std::move(fields);
        } else {
            if (fields.size() == 1 && fields[0].empty())
                continue; // trailing blank line
            if (fields.size() != t.header.size())
                throw DataError(origin + ":" + std::to_string(lineno) + ": expected " +
                                std::to_string(t.header.size()) + " fields, got " +
                                std::to_string(fields.size()));
            t.rows.push_back(std::move(fields));
        }
    }
    if (t.header.empty())
        throw DataError(origin + ": empty file");
    return t;
}

} // namespace

Table read_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot read file: " + path.string());
    return parse(in, path.string());
}

Table read_string(const std::string &text, const std::string &origin) {
    std::istringstream in(text);
    return parse(in, origin);
}

std::string escape(const std::string &field) {
    const bool needs_quotes = field.find_first_of(",\"\n") != std::string::npos;
    if (!needs_quotes)
        return field;
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"')
            out += "\"\"";
        else
            out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct Writer::Impl {
    std::ofstream out;
};

Writer::Writer(const std::filesystem::path &path) : impl_(new Impl) {
    impl_->out.open(path, std::ios::binary); // binary: no CRLF translation anywhere
    if (!impl_->out)
        throw DataError("cannot write file: " + path.string());
}

Writer::~Writer() { delete impl_; }

void Writer::row(const std::vector<std::string> &fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            impl_->out << ',';
        impl_->out << escape(fields[i]);
    }
    impl_->out << '\n';
}

double parse_double(const std::string &s, const std::string &context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception &) {
        throw DataError(context + ": not a number: '" + s + "'");
    }
}

long long parse_int(const std::string &s, const std::string &context) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception &) {
        throw DataError(context + ": not an integer: '" + s + "'");
    }
}

} // namespace mtfl::csv
