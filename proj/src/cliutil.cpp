#include "mvsc/cliutil.hpp"

#include <stdexcept>

namespace mvsc {

std::pair<int, int> parse_size(const std::string& s) {
    size_t x = s.find('x');
    if (x == std::string::npos) x = s.find('X');
    if (x == std::string::npos || x == 0 || x + 1 >= s.size())
        throw std::invalid_argument("size must be WxH: " + s);
    int w, h;
    try {
        size_t used = 0;
        w = std::stoi(s.substr(0, x), &used);
        if (used != x) throw std::invalid_argument("");
        std::string hs = s.substr(x + 1);
        h = std::stoi(hs, &used);
        if (used != hs.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("size must be WxH: " + s);
    }
    if (w <= 0 || h <= 0 || w % 2 || h % 2)
        throw std::invalid_argument("dimensions must be positive and even: " + s);
    return {w, h};
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t p = s.find(sep, start);
        if (p == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, p - start));
        start = p + 1;
    }
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (const std::string& part : split(s, ',')) {
        size_t used = 0;
        int v = std::stoi(part, &used);
        if (used != part.size()) throw std::invalid_argument("not an integer: " + part);
        out.push_back(v);
    }
    return out;
}

}  // namespace mvsc
