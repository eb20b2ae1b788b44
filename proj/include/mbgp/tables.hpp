#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mbgp/net.hpp"

namespace mbgp {

std::string read_text_file(const std::string& path);                 // throws Errc::Io
void write_text_file(const std::string& path, const std::string& s); // throws Errc::Io

// Splits one CSV line. With max_fields > 0 the last field keeps any
// remaining commas (AS names contain them).
std::vector<std::string> split_csv(const std::string& line, size_t max_fields = 0);

// PeeringDB-style IXP membership data: which exchange owns which peering
// LAN, and which member AS sits on which LAN address.
struct IxpRecord {
    std::string ixp_name;
    Prefix ixp_prefix;
    uint32_t member_asn = 0;
    Ipv4 member_ip;
};

class IxpDataset {
public:
    // Rows whose member_ip falls outside ixp_prefix are rejected.
    bool add(IxpRecord rec);

    const IxpRecord* member_by_ip(Ipv4 ip) const;
    // Name of the IXP whose peering LAN contains ip, if any.
    std::optional<std::string> lan_containing(Ipv4 ip) const;

    const std::vector<IxpRecord>& records() const { return records_; }
    size_t size() const { return records_.size(); }

    // CSV: ixp_name,ixp_prefix,member_asn,member_ip
    static IxpDataset from_csv(const std::string& text, size_t* skipped = nullptr);
    std::string to_csv() const;

private:
    std::vector<IxpRecord> records_;
    std::map<Ipv4, size_t> by_ip_;
    std::vector<std::pair<Prefix, std::string>> lans_;
};

// Announced prefixes with their origin AS; duplicates allowed (multi-origin).
struct PrefixTable {
    std::vector<std::pair<Prefix, uint32_t>> entries;

    // distinct /24 prefixes originated by asn, ascending
    std::vector<Prefix> slash24_of(uint32_t asn) const;
    std::optional<uint32_t> origin_of(Ipv4 ip) const;  // longest-prefix match

    // CSV: prefix,origin_asn
    static PrefixTable from_csv(const std::string& text, size_t* skipped = nullptr);
    std::string to_csv() const;
};

struct AsRankEntry {
    uint32_t asn = 0;
    uint32_t rank = 0;
    uint64_t cone_size = 0;
    std::string name;
};

struct AsRankTable {
    std::map<uint32_t, AsRankEntry> by_asn;

    // CSV: asn,rank,cone_size,name (name may contain commas)
    static AsRankTable from_csv(const std::string& text, size_t* skipped = nullptr);
    std::string to_csv() const;
};

}  // namespace mbgp
