#include "retlab/target_io.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

namespace retlab {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

std::string pack_bits(const std::vector<std::uint8_t>& bits) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bits.size() / 4 + 1);
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    unsigned nibble = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      nibble <<= 1;
      if (i + j < bits.size() && bits[i + j]) nibble |= 1;
    }
    out.push_back(kHex[nibble]);
  }
  return out;
}

std::vector<std::uint8_t> unpack_bits(const std::string& hex, std::uint64_t count) {
  if (hex.size() != (count + 3) / 4) throw std::invalid_argument("bit-packed X has wrong length");
  std::vector<std::uint8_t> out(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const char c = hex[i / 4];
    unsigned nibble = 0;
    if (c >= '0' && c <= '9') {
      nibble = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      nibble = c - 'a' + 10;
    } else {
      throw std::invalid_argument("bit-packed X is not lowercase hex");
    }
    out[i] = (nibble >> (3 - i % 4)) & 1U;
  }
  return out;
}

json rationals(const std::vector<Rational>& v) {
  json arr = json::array();
  for (const auto& x : v) arr.push_back(to_fraction_string(x));
  return arr;
}

std::vector<Rational> parse_rationals(const json& arr) {
  std::vector<Rational> out;
  out.reserve(arr.size());
  for (const auto& s : arr) out.push_back(parse_rational(s.get<std::string>()));
  return out;
}

json family_json(const TargetFamily& f) {
  json j;
  j["a"] = to_fraction_string(f.a);
  j["base"] = f.base;
  j["mode"] = f.mode == TargetMode::raw ? "raw" : "dyadic";
  if (f.phi.is_identity()) {
    j["phi"] = "identity";
  } else {
    j["phi"] = "power:" + to_fraction_string(*f.phi.exponent());
  }
  return j;
}

TargetFamily family_from(const json& j) {
  TargetFamily f;
  f.a = parse_rational(j.at("a").get<std::string>());
  f.base = j.at("base").get<unsigned>();
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "raw") {
    f.mode = TargetMode::raw;
  } else if (mode == "dyadic") {
    f.mode = TargetMode::dyadic;
  } else {
    throw std::invalid_argument("unknown target mode '" + mode + "'");
  }
  const std::string phi = j.at("phi").get<std::string>();
  if (phi == "identity") {
    f.phi = Sampler::identity();
  } else if (phi.rfind("power:", 0) == 0) {
    f.phi = Sampler::power(parse_rational(phi.substr(6)));
  } else {
    throw std::invalid_argument("unknown sampler '" + phi + "'");
  }
  f.validate();
  return f;
}

}  // namespace

std::string hitting_to_json(const HittingSequence& h) {
  json j;
  j["schema"] = "retlab.hitting";
  j["version"] = kSchemaVersion;
  j["family"] = family_json(h.family);
  j["N"] = h.n_max;
  j["X"] = pack_bits(h.x);
  j["sigma"] = h.sigma;
  j["hits"] = h.hits;
  j["undecided"] = h.undecided;
  return j.dump();
}

HittingSequence hitting_from_json(std::string_view text) {
  const json j = json::parse(text);
  if (j.at("schema") != "retlab.hitting") throw std::invalid_argument("not a hitting sequence");
  HittingSequence h;
  h.family = family_from(j.at("family"));
  h.n_max = j.at("N").get<std::uint64_t>();
  h.x = unpack_bits(j.at("X").get<std::string>(), h.n_max);
  h.sigma = j.at("sigma").get<std::vector<double>>();
  if (h.sigma.size() != h.n_max) throw std::invalid_argument("sigma has wrong length");
  h.hits = j.at("hits").get<std::vector<std::uint64_t>>();
  h.undecided = j.at("undecided").get<std::vector<std::uint64_t>>();
  double sum = 0.0;
  double comp = 0.0;
  h.w.reserve(h.n_max);
  for (double s : h.sigma) {
    const double t = sum + s;
    comp += std::abs(sum) >= std::abs(s) ? (sum - t) + s : (s - t) + sum;
    sum = t;
    h.w.push_back(sum + comp);
  }
  return h;
}

std::string dyadic_to_json(const DyadicTarget& t) {
  json j;
  j["schema"] = "retlab.dyadic";
  j["version"] = kSchemaVersion;
  j["base"] = t.base;
  j["a"] = to_fraction_string(t.a);
  j["N"] = t.n_max;
  j["gamma"] = rationals(t.gamma);
  j["bracket"] = t.bracket;
  j["denom_exp"] = t.denom_exp;
  j["f_lo"] = rationals(t.f_lo);
  j["f_hi"] = rationals(t.f_hi);
  return j.dump();
}

DyadicTarget dyadic_from_json(std::string_view text) {
  const json j = json::parse(text);
  if (j.at("schema") != "retlab.dyadic") throw std::invalid_argument("not a dyadic target");
  DyadicTarget t;
  t.base = j.at("base").get<unsigned>();
  t.a = parse_rational(j.at("a").get<std::string>());
  t.n_max = j.at("N").get<std::uint64_t>();
  t.gamma = parse_rationals(j.at("gamma"));
  t.bracket = j.at("bracket").get<std::vector<unsigned>>();
  t.denom_exp = j.at("denom_exp").get<std::vector<unsigned>>();
  t.f_lo = parse_rationals(j.at("f_lo"));
  t.f_hi = parse_rationals(j.at("f_hi"));
  if (t.gamma.size() != t.n_max || t.bracket.size() != t.n_max ||
      t.denom_exp.size() != t.n_max || t.f_lo.size() != t.n_max || t.f_hi.size() != t.n_max) {
    throw std::invalid_argument("dyadic target arrays have inconsistent lengths");
  }
  return t;
}

}  // namespace retlab
