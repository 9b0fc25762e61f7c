#pragma once

// Length-prefixed frames: "ARPQ" | version u16 | type u8 | length u32 | payload.
// All integers little-endian.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arpf/features.hpp"

namespace arpf::wire {

inline constexpr std::array<std::uint8_t, 4> kMagic = {'A', 'R', 'P', 'Q'};
inline constexpr std::uint16_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 11;
inline constexpr std::uint32_t kMaxPayload = 64u << 20;

enum class MessageType : std::uint8_t { Hello = 0, QueryBits = 1, SimilarityReply = 2, ClassReply = 3, Error = 4 };

enum class ErrorCode : std::uint16_t { VersionMismatch = 1, BadRequest = 2, Internal = 3 };

enum class Mode : std::uint8_t { Classify = 0, Similarity = 1 };

struct Frame {
  std::uint16_t version = kVersion;
  MessageType type = MessageType::Hello;
  std::vector<std::uint8_t> payload;

  bool operator==(const Frame&) const = default;
};

/// Bad magic, unknown type, oversized or truncated frames.
struct MalformedFrame : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Header {
  std::uint16_t version;
  MessageType type;
  std::uint32_t length;
};

std::vector<std::uint8_t> encode(const Frame& frame);
Header decode_header(std::span<const std::uint8_t> bytes);
/// Exactly one frame; trailing bytes are an error.
Frame decode(std::span<const std::uint8_t> bytes);

struct HelloRequest {
  Mode mode = Mode::Classify;
  std::uint32_t top_k = 10;
};

/// Server answer to Hello: the public parameters a client needs to embed.
struct HelloReply {
  std::uint32_t m = 0;
  std::uint64_t seed = 0;
  std::uint64_t database_size = 0;
  std::string sampler;
};

struct Similarity {
  std::uint64_t index;
  double value;
  bool operator==(const Similarity&) const = default;
};

struct ClassResult {
  std::int32_t label = 0;
  std::vector<double> scores;
  bool operator==(const ClassResult&) const = default;
};

struct ErrorInfo {
  ErrorCode code = ErrorCode::Internal;
  std::string message;
};

Frame make_hello(const HelloRequest& req);
Frame make_hello_reply(const HelloReply& rep);
/// Payload m u32 followed by ⌈m/8⌉ packed bytes.
Frame make_query(const PackedBits& bits);
Frame make_similarity_reply(const std::vector<Similarity>& items);
Frame make_class_reply(const ClassResult& result);
Frame make_error(ErrorCode code, const std::string& message);

HelloRequest parse_hello(const Frame& f);
HelloReply parse_hello_reply(const Frame& f);
PackedBits parse_query(const Frame& f);
std::vector<Similarity> parse_similarity_reply(const Frame& f);
ClassResult parse_class_reply(const Frame& f);
ErrorInfo parse_error(const Frame& f);

}  // namespace arpf::wire
