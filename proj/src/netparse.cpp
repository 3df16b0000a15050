// Copyright 2026 ProvLet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "provlet/netparse.hpp"

#include <arpa/inet.h>

#include <cstdio>
#include <cstring>

#include "provlet/errors.hpp"

namespace provlet {

namespace {

constexpr std::size_t kGlobalHeaderSize = 24;
constexpr std::size_t kRecordHeaderSize = 16;

std::uint32_t bswap32(std::uint32_t v) { return __builtin_bswap32(v); }
std::uint16_t bswap16(std::uint16_t v) { return __builtin_bswap16(v); }

std::uint32_t load_u32(const std::uint8_t* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

std::uint16_t load_u16(const std::uint8_t* p) {
  std::uint16_t v;
  std::memcpy(&v, p, 2);
  return v;
}

std::uint16_t be16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] << 8 | p[1]);
}

std::string ipv4_to_string(const std::uint8_t* p) {
  char buf[INET_ADDRSTRLEN];
  std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", p[0], p[1], p[2], p[3]);
  return buf;
}

std::string ipv6_to_string(const std::uint8_t* p) {
  char buf[INET6_ADDRSTRLEN];
  inet_ntop(AF_INET6, p, buf, sizeof(buf));
  return buf;
}

std::string mac_to_string(const std::uint8_t* p) {
  char buf[18];
  std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", p[0], p[1],
                p[2], p[3], p[4], p[5]);
  return buf;
}

PacketError too_short(const std::string& layer) {
  return {PacketError::Kind::FrameTooShort, layer,
          "frame too short at " + layer + " layer"};
}

// Fills transport-layer fields from the bytes following the IP header.
void decode_transport(DecodedPacket& pkt, std::span<const std::uint8_t> rest,
                      std::uint8_t proto, bool first_fragment) {
  pkt.ip_proto = proto;
  if (first_fragment && (proto == 6 || proto == 17) && rest.size() >= 4) {
    pkt.protocol = proto == 6 ? TransportProto::Tcp : TransportProto::Udp;
    pkt.src_port = be16(rest.data());
    pkt.dst_port = be16(rest.data() + 2);
  } else {
    // Non-first fragments and truncated transport headers carry no ports.
    pkt.protocol = TransportProto::Other;
  }
}

std::variant<DecodedPacket, PacketError> decode_ipv4(
    DecodedPacket pkt, std::span<const std::uint8_t> p) {
  if (p.size() < 20) return too_short("ipv4");
  const std::size_t ihl = (p[0] & 0x0f) * 4u;
  if (ihl < 20 || p.size() < ihl) return too_short("ipv4");
  pkt.src_ip = ipv4_to_string(p.data() + 12);
  pkt.dst_ip = ipv4_to_string(p.data() + 16);
  pkt.extra["ttl"] = std::to_string(p[8]);
  const std::uint16_t frag = be16(p.data() + 6);
  const bool df = frag & 0x4000;
  const bool mf = frag & 0x2000;
  const std::uint16_t frag_offset = frag & 0x1fff;
  if (df) pkt.extra["ip_df"] = "1";
  if (mf) pkt.extra["ip_mf"] = "1";
  if (frag_offset) pkt.extra["ip_frag_offset"] = std::to_string(frag_offset);
  decode_transport(pkt, p.subspan(ihl), p[9], frag_offset == 0);
  return pkt;
}

std::variant<DecodedPacket, PacketError> decode_ipv6(
    DecodedPacket pkt, std::span<const std::uint8_t> p) {
  if (p.size() < 40) return too_short("ipv6");
  pkt.src_ip = ipv6_to_string(p.data() + 8);
  pkt.dst_ip = ipv6_to_string(p.data() + 24);
  pkt.extra["hop_limit"] = std::to_string(p[7]);
  // Extension headers are not walked; the next-header number is taken as-is.
  decode_transport(pkt, p.subspan(40), p[6], true);
  return pkt;
}

}  // namespace

std::string DecodedPacket::protocol_name() const {
  switch (protocol) {
    case TransportProto::Tcp: return "TCP";
    case TransportProto::Udp: return "UDP";
    case TransportProto::Other:
      return "OTHER(" + std::to_string(ip_proto) + ")";
  }
  return "?";
}

std::variant<DecodedPacket, PacketError> decode_packet(
    std::uint32_t linktype, std::span<const std::uint8_t> payload,
    TimestampMs ts, std::uint32_t original_len) {
  DecodedPacket pkt;
  pkt.ts = ts;
  pkt.length = original_len;

  if (linktype == kLinktypeEthernet) {
    if (payload.size() < 14) return too_short("ethernet");
    pkt.extra["dst_mac"] = mac_to_string(payload.data());
    pkt.extra["src_mac"] = mac_to_string(payload.data() + 6);
    const std::uint16_t ethertype = be16(payload.data() + 12);
    auto rest = payload.subspan(14);
    if (ethertype == 0x0800) return decode_ipv4(std::move(pkt), rest);
    if (ethertype == 0x86DD) return decode_ipv6(std::move(pkt), rest);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "ethertype 0x%04x", ethertype);
    return PacketError{PacketError::Kind::NonIpFrame, "ethernet",
                       std::string("non-IP frame: ") + buf};
  }
  if (linktype == kLinktypeRawIp) {
    if (payload.empty()) return too_short("ip");
    const std::uint8_t version = payload[0] >> 4;
    if (version == 4) return decode_ipv4(std::move(pkt), payload);
    if (version == 6) return decode_ipv6(std::move(pkt), payload);
    return PacketError{PacketError::Kind::NonIpFrame, "ip",
                       "raw-IP frame with version " + std::to_string(version)};
  }
  return PacketError{PacketError::Kind::NonIpFrame, "link",
                     "unsupported linktype " + std::to_string(linktype)};
}

PcapReader::PcapReader(std::span<const std::uint8_t> data) : data_(data) {
  if (data_.size() >= 4 && load_u32(data_.data()) == kPcapNgMagic) {
    throw ParseError(
        "BadMagic: next-generation capture format is not supported", 0);
  }
  if (data_.size() < kGlobalHeaderSize) {
    throw ParseError("TruncatedHeader: capture file shorter than the "
                     "24-byte global header",
                     data_.size());
  }
  const std::uint32_t magic = load_u32(data_.data());
  if (magic == kPcapMagicMicros) {
    swapped_ = false;
    nanos_ = false;
  } else if (magic == bswap32(kPcapMagicMicros)) {
    swapped_ = true;
    nanos_ = false;
  } else if (magic == kPcapMagicNanos) {
    swapped_ = false;
    nanos_ = true;
  } else if (magic == bswap32(kPcapMagicNanos)) {
    swapped_ = true;
    nanos_ = true;
  } else {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "BadMagic: 0x%08x", magic);
    throw ParseError(buf, 0);
  }
  snaplen_ = read_u32(16);
  linktype_ = read_u32(20);
  pos_ = kGlobalHeaderSize;
}

std::uint32_t PcapReader::read_u32(std::size_t offset) const {
  std::uint32_t v = load_u32(data_.data() + offset);
  return swapped_ ? bswap32(v) : v;
}

std::uint16_t PcapReader::read_u16(std::size_t offset) const {
  std::uint16_t v = load_u16(data_.data() + offset);
  return swapped_ ? bswap16(v) : v;
}

std::optional<PcapItem> PcapReader::next() {
  if (pos_ >= data_.size()) return std::nullopt;

  const std::size_t index = index_++;
  if (data_.size() - pos_ < kRecordHeaderSize) {
    pos_ = data_.size();
    return PcapItem{index,
                    PacketError{PacketError::Kind::TruncatedPacket, "record",
                                "truncated record header"}};
  }
  const std::uint32_t ts_sec = read_u32(pos_);
  const std::uint32_t ts_subsec = read_u32(pos_ + 4);
  const std::uint32_t captured_len = read_u32(pos_ + 8);
  const std::uint32_t original_len = read_u32(pos_ + 12);
  pos_ += kRecordHeaderSize;

  TimestampMs ts = static_cast<TimestampMs>(ts_sec) * 1000 +
                   (nanos_ ? ts_subsec / 1000000 : ts_subsec / 1000);

  if (data_.size() - pos_ < captured_len) {
    pos_ = data_.size();
    return PcapItem{index,
                    PacketError{PacketError::Kind::TruncatedPacket, "record",
                                "captured length " +
                                    std::to_string(captured_len) +
                                    " runs past end of file"}};
  }
  auto payload = data_.subspan(pos_, captured_len);
  pos_ += captured_len;

  return PcapItem{index, decode_packet(linktype_, payload, ts, original_len)};
}

std::vector<PcapItem> parse_pcap(std::span<const std::uint8_t> data) {
  PcapReader reader(data);
  std::vector<PcapItem> items;
  while (auto item = reader.next()) items.push_back(std::move(*item));
  return items;
}

ProvRecord to_prov_record(const DecodedPacket& p,
                          const std::optional<std::string>& attribution,
                          std::string id) {
  ProvRecord r;
  r.id = std::move(id);
  r.ts = p.ts;
  r.user_id = attribution.value_or(kUnattributedUser);
  r.event_type = kNetworkPacketType;
  r.source = RecordSource::Network;
  r.attrs.emplace("src_ip", p.src_ip);
  std::string dst = p.dst_ip;
  if (p.dst_port) dst += ":" + std::to_string(*p.dst_port);
  r.attrs.emplace("dst", std::move(dst));
  if (p.src_port)
    r.attrs.emplace("src_port", static_cast<std::int64_t>(*p.src_port));
  r.attrs.emplace("protocol", p.protocol_name());
  r.attrs.emplace("length", static_cast<std::int64_t>(p.length));
  for (const auto& [k, v] : p.extra) r.attrs.emplace(k, v);
  return r;
}

}  // namespace provlet
