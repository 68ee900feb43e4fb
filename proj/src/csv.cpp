#include "quotecross/csv.hpp"

namespace quotecross {

std::optional<std::vector<std::string>> CsvReader::next(std::size_t& line) {
    int c = in_.get();
    if (c == EOF) return std::nullopt;

    ++line_;
    line = line_;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;

    while (true) {
        if (c == EOF) {
            fields.push_back(std::move(field));
            return fields;
        }
        char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                int peek = in_.peek();
                if (peek == '"') {
                    field.push_back('"');
                    in_.get();
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line_;
                field.push_back(ch);
            }
        } else if (ch == '"' && field.empty()) {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(std::move(field));
            return fields;
        } else {
            field.push_back(ch);
        }
        c = in_.get();
    }
}

std::string csv_escape(std::string_view field) {
    bool needs_quote = false;
    for (char c : field) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quote = true;
            break;
        }
    }
    if (!needs_quote) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_escape(fields[i]);
    }
    return out;
}

}  // namespace quotecross
