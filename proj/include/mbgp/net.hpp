#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mbgp {

// IPv4 address. Stored host-order so arithmetic and ordering are plain
// integer operations; rendered/hashes use network byte order.
struct Ipv4 {
    uint32_t v = 0;

    constexpr auto operator<=>(const Ipv4&) const = default;

    constexpr uint8_t octet(int i) const { return uint8_t(v >> (24 - 8 * i)); }

    static std::optional<Ipv4> parse(std::string_view s);
    std::string str() const;
};

// CIDR prefix; base is kept masked to the prefix length.
struct Prefix {
    Ipv4 base;
    int len = 32;

    constexpr auto operator<=>(const Prefix&) const = default;

    static std::optional<Prefix> parse(std::string_view s);
    std::string str() const;

    constexpr uint32_t mask() const {
        return len == 0 ? 0u : ~uint32_t(0) << (32 - len);
    }
    constexpr bool contains(Ipv4 a) const { return (a.v & mask()) == base.v; }
    constexpr uint64_t size() const { return uint64_t(1) << (32 - len); }
    constexpr Ipv4 host(uint32_t offset) const { return Ipv4{base.v + offset}; }
};

// 64-bit FNV-1a.
constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr uint64_t kFnvPrime = 0x100000001b3ull;

constexpr uint64_t fnv1a64(const uint8_t* data, size_t n, uint64_t h = kFnvOffset) {
    for (size_t i = 0; i < n; i++) {
        h ^= data[i];
        h *= kFnvPrime;
    }
    return h;
}

// Per-flow digest: FNV-1a over the 8-byte concatenation of src and dst,
// each in network byte order.
constexpr uint64_t flow_hash(Ipv4 src, Ipv4 dst) {
    uint8_t b[8] = {src.octet(0), src.octet(1), src.octet(2), src.octet(3),
                    dst.octet(0), dst.octet(1), dst.octet(2), dst.octet(3)};
    return fnv1a64(b, 8);
}

// Error taxonomy shared by all modules. Parsers and loaders throw Error;
// everything else reports through return values.
enum class Errc {
    UnrecognizedSummaryFormat,
    NoRoutesInResponse,
    MixedPrefixes,
    NoRoutes,
    BadInput,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(Errc c, const std::string& what) : std::runtime_error(what), code_(c) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace mbgp
