#include "ini.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "voiceml/errors.hpp"

namespace voiceml::cli {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

IniFile IniFile::parse_text(const std::string& text, const std::string& origin) {
    IniFile ini;
    std::stringstream ss(text);
    std::string line;
    std::string section;
    int line_no = 0;
    auto section_entries = [&]() -> std::vector<Entry>& {
        for (auto& [name, entries] : ini.sections)
            if (name == section) return entries;
        ini.sections.emplace_back(section, std::vector<Entry>{});
        return ini.sections.back().second;
    };
    while (std::getline(ss, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": empty section name");
            section_entries();
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected key = value");
        Entry entry;
        entry.key = trim(t.substr(0, eq));
        entry.value = trim(t.substr(eq + 1));
        entry.line = line_no;
        if (entry.key.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        section_entries().push_back(std::move(entry));
    }
    return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str(), path);
}

double to_double(const IniFile::Entry& entry, const std::string& origin) {
    char* end = nullptr;
    const double v = std::strtod(entry.value.c_str(), &end);
    if (end == entry.value.c_str() || *end != '\0')
        throw ConfigError(origin + ":" + std::to_string(entry.line) + ": '" + entry.key +
                          "' is not a number");
    return v;
}

long to_long(const IniFile::Entry& entry, const std::string& origin) {
    char* end = nullptr;
    const long v = std::strtol(entry.value.c_str(), &end, 10);
    if (end == entry.value.c_str() || *end != '\0')
        throw ConfigError(origin + ":" + std::to_string(entry.line) + ": '" + entry.key +
                          "' is not an integer");
    return v;
}

bool to_bool(const IniFile::Entry& entry, const std::string& origin) {
    if (entry.value == "true" || entry.value == "1") return true;
    if (entry.value == "false" || entry.value == "0") return false;
    throw ConfigError(origin + ":" + std::to_string(entry.line) + ": '" + entry.key +
                      "' is not a boolean (true/false)");
}

std::pair<double, double> to_range(const IniFile::Entry& entry, const std::string& origin) {
    auto comma = entry.value.find(',');
    if (comma == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(entry.line) + ": '" + entry.key +
                          "' must be 'lo,hi'");
    IniFile::Entry lo{entry.key, trim(entry.value.substr(0, comma)), entry.line};
    IniFile::Entry hi{entry.key, trim(entry.value.substr(comma + 1)), entry.line};
    return {to_double(lo, origin), to_double(hi, origin)};
}

}  // namespace voiceml::cli
