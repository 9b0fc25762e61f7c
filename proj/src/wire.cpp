#include "arpf/wire.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace arpf::wire {

namespace {

class Writer {
 public:
  template <class T>
  Writer& put(T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    out.insert(out.end(), b, b + sizeof(T));
    return *this;
  }
  Writer& bytes(std::span<const std::uint8_t> s) {
    out.insert(out.end(), s.begin(), s.end());
    return *this;
  }
  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> s) : s_(s) {}
  template <class T>
  T get() {
    need(sizeof(T));
    unsigned char b[sizeof(T)];
    std::memcpy(b, s_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto r = s_.subspan(pos_, n);
    pos_ += n;
    return r;
  }
  std::size_t remaining() const { return s_.size() - pos_; }
  void done() const {
    if (remaining()) throw MalformedFrame("trailing payload bytes");
  }

 private:
  void need(std::size_t n) const {
    if (s_.size() - pos_ < n) throw MalformedFrame("truncated payload");
  }
  std::span<const std::uint8_t> s_;
  std::size_t pos_ = 0;
};

void expect(const Frame& f, MessageType t) {
  if (f.type != t) throw MalformedFrame("unexpected message type");
}

Frame frame(MessageType t, Writer w) { return Frame{kVersion, t, std::move(w.out)}; }

}  // namespace

std::vector<std::uint8_t> encode(const Frame& frame) {
  if (frame.payload.size() > kMaxPayload) throw MalformedFrame("payload too large");
  Writer w;
  w.bytes(kMagic);
  w.put(frame.version).put(static_cast<std::uint8_t>(frame.type)).put(static_cast<std::uint32_t>(frame.payload.size()));
  w.bytes(frame.payload);
  return std::move(w.out);
}

Header decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw MalformedFrame("truncated header");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) throw MalformedFrame("bad magic");
  Reader r(bytes.subspan(4, kHeaderSize - 4));
  Header h;
  h.version = r.get<std::uint16_t>();
  const auto type = r.get<std::uint8_t>();
  if (type > static_cast<std::uint8_t>(MessageType::Error)) throw MalformedFrame("unknown message type");
  h.type = static_cast<MessageType>(type);
  h.length = r.get<std::uint32_t>();
  if (h.length > kMaxPayload) throw MalformedFrame("payload too large");
  return h;
}

Frame decode(std::span<const std::uint8_t> bytes) {
  const Header h = decode_header(bytes);
  if (bytes.size() != kHeaderSize + h.length) throw MalformedFrame("length prefix does not match frame size");
  const auto p = bytes.subspan(kHeaderSize);
  return Frame{h.version, h.type, {p.begin(), p.end()}};
}

Frame make_hello(const HelloRequest& req) {
  Writer w;
  w.put(static_cast<std::uint8_t>(req.mode)).put(req.top_k);
  return frame(MessageType::Hello, std::move(w));
}

Frame make_hello_reply(const HelloReply& rep) {
  Writer w;
  w.put(rep.m).put(rep.seed).put(rep.database_size).put(static_cast<std::uint16_t>(rep.sampler.size()));
  w.bytes({reinterpret_cast<const std::uint8_t*>(rep.sampler.data()), rep.sampler.size()});
  return frame(MessageType::Hello, std::move(w));
}

Frame make_query(const PackedBits& bits) {
  if (bits.bytes.size() != (bits.m + 7) / 8) throw std::invalid_argument("make_query: size does not match m");
  Writer w;
  w.put(static_cast<std::uint32_t>(bits.m)).bytes(bits.bytes);
  return frame(MessageType::QueryBits, std::move(w));
}

Frame make_similarity_reply(const std::vector<Similarity>& items) {
  Writer w;
  w.put(static_cast<std::uint32_t>(items.size()));
  for (const auto& s : items) w.put(s.index).put(s.value);
  return frame(MessageType::SimilarityReply, std::move(w));
}

Frame make_class_reply(const ClassResult& result) {
  Writer w;
  w.put(result.label).put(static_cast<std::uint32_t>(result.scores.size()));
  for (double s : result.scores) w.put(s);
  return frame(MessageType::ClassReply, std::move(w));
}

Frame make_error(ErrorCode code, const std::string& message) {
  Writer w;
  w.put(static_cast<std::uint16_t>(code));
  w.bytes({reinterpret_cast<const std::uint8_t*>(message.data()), message.size()});
  return frame(MessageType::Error, std::move(w));
}

HelloRequest parse_hello(const Frame& f) {
  expect(f, MessageType::Hello);
  Reader r(f.payload);
  HelloRequest req;
  const auto mode = r.get<std::uint8_t>();
  if (mode > 1) throw MalformedFrame("unknown mode");
  req.mode = static_cast<Mode>(mode);
  req.top_k = r.get<std::uint32_t>();
  r.done();
  return req;
}

HelloReply parse_hello_reply(const Frame& f) {
  expect(f, MessageType::Hello);
  Reader r(f.payload);
  HelloReply rep;
  rep.m = r.get<std::uint32_t>();
  rep.seed = r.get<std::uint64_t>();
  rep.database_size = r.get<std::uint64_t>();
  const auto len = r.get<std::uint16_t>();
  const auto s = r.bytes(len);
  rep.sampler.assign(s.begin(), s.end());
  r.done();
  return rep;
}

PackedBits parse_query(const Frame& f) {
  expect(f, MessageType::QueryBits);
  Reader r(f.payload);
  PackedBits bits;
  bits.m = r.get<std::uint32_t>();
  if (bits.m == 0) throw MalformedFrame("query with m = 0");
  const auto b = r.bytes((bits.m + 7) / 8);
  bits.bytes.assign(b.begin(), b.end());
  r.done();
  return bits;
}

std::vector<Similarity> parse_similarity_reply(const Frame& f) {
  expect(f, MessageType::SimilarityReply);
  Reader r(f.payload);
  const auto count = r.get<std::uint32_t>();
  if (r.remaining() != std::size_t{count} * 16) throw MalformedFrame("similarity count mismatch");
  std::vector<Similarity> items(count);
  for (auto& s : items) {
    s.index = r.get<std::uint64_t>();
    s.value = r.get<double>();
  }
  return items;
}

ClassResult parse_class_reply(const Frame& f) {
  expect(f, MessageType::ClassReply);
  Reader r(f.payload);
  ClassResult out;
  out.label = r.get<std::int32_t>();
  const auto count = r.get<std::uint32_t>();
  if (r.remaining() != std::size_t{count} * 8) throw MalformedFrame("score count mismatch");
  out.scores.resize(count);
  for (double& s : out.scores) s = r.get<double>();
  return out;
}

ErrorInfo parse_error(const Frame& f) {
  expect(f, MessageType::Error);
  Reader r(f.payload);
  ErrorInfo e;
  e.code = static_cast<ErrorCode>(r.get<std::uint16_t>());
  const auto s = r.bytes(r.remaining());
  e.message.assign(s.begin(), s.end());
  return e;
}

}  // namespace arpf::wire
