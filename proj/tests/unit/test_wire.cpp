#include <doctest.h>

#include <cstring>

#include "arpf/philox.hpp"
#include "arpf/wire.hpp"

using namespace arpf;
using namespace arpf::wire;

TEST_CASE("header layout") {
  Frame f;
  f.type = MessageType::QueryBits;
  f.payload = {9, 8, 7};
  const auto bytes = encode(f);
  REQUIRE(bytes.size() == kHeaderSize + 3);
  CHECK(std::memcmp(bytes.data(), "ARPQ", 4) == 0);
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 1);
  CHECK(bytes[7] == 3);
  CHECK(bytes[8] == 0);
  CHECK(bytes[9] == 0);
  CHECK(bytes[10] == 0);
  const auto h = decode_header(bytes);
  CHECK(h.version == 1);
  CHECK(h.type == MessageType::QueryBits);
  CHECK(h.length == 3);
}

TEST_CASE("property: random frames round trip") {
  PhiloxStream rng(5, 0);
  for (int t = 0; t < 1000; ++t) {
    Frame f;
    f.version = static_cast<std::uint16_t>(rng.next_u32());
    f.type = static_cast<MessageType>(rng.next_u32() % 5);
    f.payload.resize(rng.next_u32() % 300);
    for (auto& b : f.payload) b = static_cast<std::uint8_t>(rng.next_u32());
    CHECK(decode(encode(f)) == f);
  }
}

TEST_CASE("malformed frames") {
  Frame f;
  f.payload = {1, 2, 3, 4};
  auto bytes = encode(f);
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode(bad), MalformedFrame);
  CHECK_THROWS_AS(decode(std::span(bytes).first(bytes.size() - 1)), MalformedFrame);
  CHECK_THROWS_AS(decode(std::span(bytes).first(5)), MalformedFrame);
  auto extra = bytes;
  extra.push_back(0);
  CHECK_THROWS_AS(decode(extra), MalformedFrame);
  auto wrong_type = bytes;
  wrong_type[6] = 17;
  CHECK_THROWS_AS(decode(wrong_type), MalformedFrame);
  auto huge = bytes;
  huge[10] = 0xff;
  CHECK_THROWS_AS(decode_header(huge), MalformedFrame);
}

TEST_CASE("query payload size") {
  PackedBits bits;
  bits.m = 1024;
  bits.bytes.assign(128, 0xa5);
  const auto f = make_query(bits);
  CHECK(f.type == MessageType::QueryBits);
  CHECK(f.payload.size() == 4 + 128);
  CHECK(encode(f).size() == 11 + 4 + 128);
  CHECK(parse_query(f) == bits);

  PackedBits odd;
  odd.m = 13;
  odd.bytes = {0xff, 0x1f};
  CHECK(make_query(odd).payload.size() == 6);
  CHECK(parse_query(make_query(odd)) == odd);
  auto truncated = make_query(odd);
  truncated.payload.pop_back();
  CHECK_THROWS(parse_query(truncated));
}

TEST_CASE("message payloads round trip") {
  HelloRequest h{Mode::Similarity, 7};
  const auto hb = parse_hello(make_hello(h));
  CHECK(hb.mode == Mode::Similarity);
  CHECK(hb.top_k == 7);

  HelloReply r{2048, 0x1234567890abcdefull, 500, "gaussian:0.5"};
  const auto rb = parse_hello_reply(make_hello_reply(r));
  CHECK(rb.m == 2048);
  CHECK(rb.seed == r.seed);
  CHECK(rb.database_size == 500);
  CHECK(rb.sampler == "gaussian:0.5");

  const std::vector<Similarity> sims = {{3, 0.5}, {10, -0.125}, {0, 1e-300}};
  CHECK(parse_similarity_reply(make_similarity_reply(sims)) == sims);
  CHECK(parse_similarity_reply(make_similarity_reply({})).empty());

  const ClassResult cr{-3, {0.1, -2.0, 3.5}};
  CHECK(parse_class_reply(make_class_reply(cr)) == cr);

  const auto e = parse_error(make_error(ErrorCode::BadRequest, "wrong m"));
  CHECK(e.code == ErrorCode::BadRequest);
  CHECK(e.message == "wrong m");
  CHECK(static_cast<int>(ErrorCode::VersionMismatch) == 1);

  // parsers check the message type
  CHECK_THROWS(parse_class_reply(make_error(ErrorCode::Internal, "x")));
}
