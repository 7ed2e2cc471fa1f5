#include "twinbeam/errors.hpp"

namespace twinbeam {

namespace {

std::string located(const std::string& source, std::size_t line, std::size_t column, const std::string& what) {
    std::string out = source;
    if (line > 0) {
        out += ":" + std::to_string(line);
        if (column > 0) out += ":" + std::to_string(column);
    }
    return out + ": " + what;
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, std::size_t column, const std::string& what)
    : Error(located(source, line, column, what)), line_(line), column_(column) {}

ConfigError::ConfigError(const std::string& key_path, const std::string& what)
    : Error(key_path.empty() ? what : key_path + ": " + what), key_path_(key_path) {}

}  // namespace twinbeam
