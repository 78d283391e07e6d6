#pragma once

// Output artifact emission. Every artifact opens with its run configuration
// so the body can be reproduced from the header alone; numbers print with 12
// significant digits so equal runs emit byte-identical files.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "lbsieve/errors.hpp"

namespace lbsieve::emit {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

// Key order is insertion order.
class JsonObject {
public:
    JsonObject& field(const std::string& k, double v) { return raw(k, num(v)); }
    JsonObject& field(const std::string& k, std::int64_t v) {
        return raw(k, std::to_string(v));
    }
    JsonObject& field(const std::string& k, std::uint64_t v) {
        return raw(k, std::to_string(v));
    }
    JsonObject& field(const std::string& k, int v) { return raw(k, std::to_string(v)); }
    JsonObject& field(const std::string& k, bool v) {
        return raw(k, v ? "true" : "false");
    }
    JsonObject& field(const std::string& k, const std::string& v) {
        return raw(k, quote(v));
    }
    JsonObject& field(const std::string& k, const char* v) {
        return raw(k, quote(v));
    }
    JsonObject& object(const std::string& k, const JsonObject& v) {
        return raw(k, v.str());
    }
    JsonObject& raw(const std::string& k, const std::string& json) {
        entries_.push_back({k, json});
        return *this;
    }

    std::string str() const {
        std::string out = "{";
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (i) out += ", ";
            out += quote(entries_[i].first) + ": " + entries_[i].second;
        }
        out += "}";
        return out;
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

// Config echoed as `# key=value` comment lines ahead of the column header.
class CsvWriter {
public:
    void comment(const std::string& k, const std::string& v) {
        body_ += "# " + k + "=" + v + "\n";
    }
    void header(const std::string& h) { body_ += h + "\n"; }
    void row(const std::string& r) { body_ += r + "\n"; }
    const std::string& str() const { return body_; }

private:
    std::string body_;
};

inline void write_artifact(const std::string& path, const std::string& body) {
    if (path.empty() || path == "-") {
        std::cout << body;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parameter_error("cannot write output file " + path);
    out << body;
}

} // namespace lbsieve::emit
