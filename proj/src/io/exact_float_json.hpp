#pragma once

#include <charconv>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "structprobe/io/errors.hpp"
#include "structprobe/io/json_codec.hpp"

namespace structprobe::io::detail {

/// Parses JSON, reading every floating-point number nested under one of
/// `float_keys` directly from its source text as a 32-bit float. Going
/// through double first can round a shortest-float literal to the wrong
/// float. Integer literals under those keys are widened unchanged.
class ExactFloatSax {
public:
  using Dom = nlohmann::detail::json_sax_dom_parser<Json>;

  ExactFloatSax(Json& root, std::set<std::string, std::less<>> float_keys)
      : dom_(root, true), float_keys_(std::move(float_keys)) {}

  bool null() { return dom_.null(); }
  bool boolean(bool v) { return dom_.boolean(v); }
  bool number_integer(Json::number_integer_t v) { return dom_.number_integer(v); }
  bool number_unsigned(Json::number_unsigned_t v) { return dom_.number_unsigned(v); }
  bool number_float(Json::number_float_t v, const Json::string_t& raw) {
    if (in_float_scope_ > 0) {
      float f = 0.0f;
      const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), f);
      if (ec != std::errc() || ptr != raw.data() + raw.size()) {
        throw DataError("value " + raw + " is not representable as a 32-bit float");
      }
      v = static_cast<double>(f);
    }
    return dom_.number_float(v, raw);
  }
  bool string(Json::string_t& v) { return dom_.string(v); }
  bool binary(Json::binary_t& v) { return dom_.binary(v); }
  bool start_object(std::size_t n) {
    keys_.push_back({});
    return dom_.start_object(n);
  }
  bool key(Json::string_t& k) {
    set_top(k);
    return dom_.key(k);
  }
  bool end_object() {
    set_top({});
    keys_.pop_back();
    return dom_.end_object();
  }
  bool start_array(std::size_t n) { return dom_.start_array(n); }
  bool end_array() { return dom_.end_array(); }
  template <typename Exception>
  bool parse_error(std::size_t pos, const std::string& token, const Exception& ex) {
    return dom_.parse_error(pos, token, ex);
  }

private:
  void set_top(std::string_view k) {
    if (keys_.empty()) return;
    if (float_keys_.count(keys_.back())) --in_float_scope_;
    keys_.back() = std::string(k);
    if (float_keys_.count(keys_.back())) ++in_float_scope_;
  }

  Dom dom_;
  std::set<std::string, std::less<>> float_keys_;
  std::vector<std::string> keys_;
  int in_float_scope_ = 0;
};

inline Json parse_exact_floats(std::string_view text, std::set<std::string, std::less<>> float_keys) {
  Json root;
  ExactFloatSax sax(root, std::move(float_keys));
  try {
    Json::sax_parse(text.begin(), text.end(), &sax);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  return root;
}

} // namespace structprobe::io::detail
