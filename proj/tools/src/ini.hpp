#pragma once

#include <map>
#include <string>
#include <vector>

namespace voiceml::cli {

// Minimal INI reader: [section] headers, key = value pairs, '#'/';' comments.
// Key order within a section is preserved for strict-validation messages.
struct IniFile {
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
    };
    std::vector<std::pair<std::string, std::vector<Entry>>> sections;

    static IniFile parse_file(const std::string& path);
    static IniFile parse_text(const std::string& text, const std::string& origin);
};

double to_double(const IniFile::Entry& entry, const std::string& origin);
long to_long(const IniFile::Entry& entry, const std::string& origin);
bool to_bool(const IniFile::Entry& entry, const std::string& origin);
std::pair<double, double> to_range(const IniFile::Entry& entry, const std::string& origin);

}  // namespace voiceml::cli
