#include "mbgp/net.hpp"

#include <charconv>
#include <cstdio>

namespace mbgp {

std::optional<Ipv4> Ipv4::parse(std::string_view s) {
    uint32_t v = 0;
    const char* p = s.data();
    const char* end = s.data() + s.size();
    for (int i = 0; i < 4; i++) {
        if (i > 0) {
            if (p == end || *p != '.') return std::nullopt;
            ++p;
        }
        unsigned oct = 0;
        auto [next, ec] = std::from_chars(p, end, oct);
        if (ec != std::errc{} || next == p || next - p > 3 || oct > 255) return std::nullopt;
        p = next;
        v = (v << 8) | oct;
    }
    if (p != end) return std::nullopt;
    return Ipv4{v};
}

std::string Ipv4::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", octet(0), octet(1), octet(2), octet(3));
    return buf;
}

std::optional<Prefix> Prefix::parse(std::string_view s) {
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    auto addr = Ipv4::parse(s.substr(0, slash));
    if (!addr) return std::nullopt;
    unsigned len = 0;
    auto tail = s.substr(slash + 1);
    auto [next, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), len);
    if (ec != std::errc{} || next != tail.data() + tail.size() || len > 32) return std::nullopt;
    Prefix p{*addr, int(len)};
    p.base.v &= p.mask();
    return p;
}

std::string Prefix::str() const {
    return base.str() + "/" + std::to_string(len);
}

}  // namespace mbgp
