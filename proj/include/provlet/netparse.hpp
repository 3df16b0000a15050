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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "provlet/model.hpp"

namespace provlet {

enum class TransportProto { Tcp, Udp, Other };

struct DecodedPacket {
  TimestampMs ts = 0;
  std::string src_ip;
  std::string dst_ip;
  std::optional<std::uint16_t> src_port;  // present iff TCP/UDP
  std::optional<std::uint16_t> dst_port;
  TransportProto protocol = TransportProto::Other;
  std::uint8_t ip_proto = 0;        // raw IP protocol / next-header number
  std::uint32_t length = 0;         // original (on-the-wire) length
  std::map<std::string, std::string> extra;  // ttl, frag bits, MACs, ...

  // "TCP", "UDP", or "OTHER(<proto>)".
  std::string protocol_name() const;
};

// Per-packet decode failure; the file-level parse continues past these.
struct PacketError {
  enum class Kind { TruncatedPacket, NonIpFrame, FrameTooShort };
  Kind kind = Kind::FrameTooShort;
  std::string layer;    // "ethernet", "ipv4", "udp", ... for FrameTooShort
  std::string message;
};

struct PcapItem {
  std::size_t index = 0;  // position in file order
  std::variant<DecodedPacket, PacketError> value;

  bool ok() const { return std::holds_alternative<DecodedPacket>(value); }
  const DecodedPacket& packet() const { return std::get<DecodedPacket>(value); }
  const PacketError& error() const { return std::get<PacketError>(value); }
};

// Classic capture-file magics, either byte order; microsecond and
// nanosecond timestamp variants.
inline constexpr std::uint32_t kPcapMagicMicros = 0xa1b2c3d4u;
inline constexpr std::uint32_t kPcapMagicNanos = 0xa1b23c4du;
inline constexpr std::uint32_t kPcapNgMagic = 0x0a0d0d0au;

inline constexpr std::uint32_t kLinktypeEthernet = 1;
inline constexpr std::uint32_t kLinktypeRawIp = 101;

// Streaming reader over an in-memory capture file. Construction validates
// the 24-byte global header (throws ParseError for BadMagic or a truncated
// header); next() yields packets in file order, emitting per-packet errors
// without aborting, and never reads past each record's captured length.
class PcapReader {
 public:
  explicit PcapReader(std::span<const std::uint8_t> data);

  std::optional<PcapItem> next();

  std::uint32_t snaplen() const { return snaplen_; }
  std::uint32_t linktype() const { return linktype_; }
  bool nanos() const { return nanos_; }

 private:
  std::uint32_t read_u32(std::size_t offset) const;
  std::uint16_t read_u16(std::size_t offset) const;

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::size_t index_ = 0;
  bool swapped_ = false;
  bool nanos_ = false;
  std::uint32_t snaplen_ = 0;
  std::uint32_t linktype_ = 0;
};

// Eager convenience wrapper over PcapReader.
std::vector<PcapItem> parse_pcap(std::span<const std::uint8_t> data);

// Decodes one link-layer frame. Ethernet and raw-IP linktypes; IPv4/IPv6;
// ports for TCP/UDP, everything else OTHER. Returns a PacketError for
// non-IP frames and truncated layers.
std::variant<DecodedPacket, PacketError> decode_packet(
    std::uint32_t linktype, std::span<const std::uint8_t> payload,
    TimestampMs ts, std::uint32_t original_len);

// Joins a decoded packet into the provenance stream. dst renders as
// "ip:port" when a port exists; unattributed packets get the reserved user.
ProvRecord to_prov_record(const DecodedPacket& p,
                          const std::optional<std::string>& attribution,
                          std::string id = {});

}  // namespace provlet
