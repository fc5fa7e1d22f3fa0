#include "holonet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "holonet/error.hpp"

namespace holonet {

namespace {

using json = nlohmann::json;

constexpr const char* kFormat = "holonet-checkpoint";
constexpr int kVersion = 1;

json::binary_t encode_plane(const double* data, Eigen::Index n) {
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(n) * 8);
  for (Eigen::Index k = 0; k < n; ++k) {
    auto bits = std::bit_cast<std::uint64_t>(data[k]);
    for (int b = 0; b < 8; ++b) bytes[static_cast<std::size_t>(k) * 8 + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  return json::binary_t(std::move(bytes));
}

std::vector<double> decode_plane(const json& j, Eigen::Index n) {
  const auto& bytes = j.get_binary();
  if (bytes.size() != static_cast<std::size_t>(n) * 8) throw ParseError("checkpoint: tensor plane has wrong length");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[k * 8 + b]) << (8 * b);
    out[k] = std::bit_cast<double>(bits);
  }
  return out;
}

json encode_tensor(const CMat& w) {
  const Mat re = w.real();
  const Mat im = w.imag();
  return {{"rows", w.rows()}, {"cols", w.cols()}, {"re", encode_plane(re.data(), re.size())},
          {"im", encode_plane(im.data(), im.size())}};
}

json encode_tensor(const Mat& w) { return encode_tensor(CMat(w.cast<cplx>())); }

CMat decode_tensor(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows < 0 || cols < 0) throw ParseError("checkpoint: negative tensor shape");
  const auto re = decode_plane(j.at("re"), rows * cols);
  const auto im = decode_plane(j.at("im"), rows * cols);
  CMat w(rows, cols);
  for (std::size_t k = 0; k < re.size(); ++k) w.data()[k] = {re[k], im[k]};
  return w;
}

json encode_bank(const FilterBankSpec& b) {
  if (const auto* f = std::get_if<FaberBank>(&b.kind)) {
    return {{"kind", "faber"}, {"K", f->max_order}, {"gamma", f->gamma}, {"include_order_zero", f->include_order_zero}};
  }
  const auto& r = std::get<ResolventBank>(b.kind);
  return {{"kind", "resolvent"}, {"K", r.max_power}, {"y_real", r.pole.real()}, {"y_imag", r.pole.imag()}};
}

FilterBankSpec decode_bank(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "faber") {
    return FilterBankSpec::faber(j.at("K").get<int>(), j.at("gamma").get<double>(),
                                 j.at("include_order_zero").get<bool>());
  }
  if (kind == "resolvent") {
    return FilterBankSpec::resolvent(j.at("K").get<int>(),
                                     {j.at("y_real").get<double>(), j.at("y_imag").get<double>()});
  }
  throw ParseError("checkpoint: unknown bank kind '" + kind + "'");
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const HoloNetModel& m) {
  m.validate();
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["encoding"] = "float64-le column-major re/im planes";
  j["operator"] = std::string(to_string(m.spec.op));
  j["fwd_bank"] = encode_bank(m.spec.fwd_bank);
  j["bwd_bank"] = encode_bank(m.spec.bwd_bank);
  j["widths"] = m.spec.widths;
  j["alpha"] = m.spec.alpha;
  j["rho"] = std::string(to_string(m.spec.rho));
  j["field"] = std::string(to_string(m.spec.field));
  j["output_dim"] = m.spec.output_dim;
  json layers = json::array();
  for (const auto& p : m.layers) {
    json l;
    l["w_fwd"] = json::array();
    for (const auto& w : p.w_fwd) l["w_fwd"].push_back(encode_tensor(w));
    l["w_bwd"] = json::array();
    for (const auto& w : p.w_bwd) l["w_bwd"].push_back(encode_tensor(w));
    l["bias"] = encode_tensor(CMat(p.bias));
    layers.push_back(std::move(l));
  }
  j["layers"] = std::move(layers);
  j["readout"] = {{"weight", encode_tensor(m.readout.weight)}, {"bias", encode_tensor(Mat(m.readout.bias))}};
  return json::to_cbor(j);
}

HoloNetModel decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  HoloNetModel m;
  try {
    const json j = json::from_cbor(bytes);
    if (j.at("format").get<std::string>() != kFormat) throw ParseError("checkpoint: not a holonet checkpoint");
    if (j.at("version").get<int>() != kVersion) throw ParseError("checkpoint: unsupported version");
    m.spec.op = operator_kind_from_string(j.at("operator").get<std::string>());
    m.spec.fwd_bank = decode_bank(j.at("fwd_bank"));
    m.spec.bwd_bank = decode_bank(j.at("bwd_bank"));
    m.spec.widths = j.at("widths").get<std::vector<Eigen::Index>>();
    m.spec.alpha = j.at("alpha").get<double>();
    m.spec.rho = nonlinearity_from_string(j.at("rho").get<std::string>());
    m.spec.field = scalar_field_from_string(j.at("field").get<std::string>());
    m.spec.output_dim = j.at("output_dim").get<Eigen::Index>();
    for (const auto& l : j.at("layers")) {
      LayerParams p;
      for (const auto& w : l.at("w_fwd")) p.w_fwd.push_back(decode_tensor(w));
      for (const auto& w : l.at("w_bwd")) p.w_bwd.push_back(decode_tensor(w));
      const CMat b = decode_tensor(l.at("bias"));
      if (b.rows() != 1) throw ParseError("checkpoint: bias must be a row");
      p.bias = b.row(0);
      m.layers.push_back(std::move(p));
    }
    m.readout.weight = decode_tensor(j.at("readout").at("weight")).real();
    const CMat rb = decode_tensor(j.at("readout").at("bias"));
    if (rb.cols() != 1) throw ParseError("checkpoint: readout bias must be a column");
    m.readout.bias = rb.col(0).real();
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  m.validate();
  return m;
}

void save_checkpoint(const HoloNetModel& m, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(m);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

HoloNetModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace holonet
