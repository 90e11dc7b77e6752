#include "hardinv/nncore/model_io.hpp"

#include <cmath>
#include <string>

#include "hardinv/common/errors.hpp"

namespace hardinv {

namespace {

std::vector<double> finite_array(const Json& j, std::size_t expected, const std::string& where) {
  if (!j.is_array() || j.size() != expected) {
    throw IngestError(where + ": expected an array of " + std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const Json& v : j) {
    if (!v.is_number()) throw IngestError(where + ": non-numeric entry");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw IngestError(where + ": non-finite entry");
    out.push_back(d);
  }
  return out;
}

}  // namespace

Json mlp_to_json(const Mlp& net) {
  Json layers = Json::array();
  for (const LinearLayer& l : net.layers()) {
    Json weight = Json::array();
    for (std::size_t r = 0; r < l.weight.rows(); ++r) {
      const auto row = l.weight.row(r);
      weight.push_back(Json(std::vector<double>(row.begin(), row.end())));
    }
    layers.push_back(Json{{"weight", std::move(weight)}, {"bias", l.bias}});
  }
  return Json{{"schema_version", kModelSchemaVersion},
              {"widths", {net.shape().input, net.shape().hidden, net.shape().output}},
              {"output_mode", std::string(to_string(net.output_mode()))},
              {"layers", std::move(layers)}};
}

Mlp mlp_from_json(const Json& doc) {
  try {
    if (!doc.is_object()) throw IngestError("model: expected a JSON object");
    if (doc.value("schema_version", -1) != kModelSchemaVersion) {
      throw IngestError("model: unsupported schema_version");
    }
    const Json& widths = doc.at("widths");
    if (!widths.is_array() || widths.size() != 3) throw IngestError("model: widths must hold 3 entries");
    MlpShape shape{widths[0].get<std::size_t>(), widths[1].get<std::size_t>(), widths[2].get<std::size_t>()};
    if (shape.input == 0 || shape.hidden == 0 || shape.output == 0) {
      throw IngestError("model: widths must be positive");
    }
    Mlp net(shape, parse_output_mode(doc.at("output_mode").get<std::string>()));
    const Json& layers = doc.at("layers");
    if (!layers.is_array() || layers.size() != Mlp::kLayerCount) {
      throw IngestError("model: expected " + std::to_string(Mlp::kLayerCount) + " layers");
    }
    const auto dst = net.mutable_layers();
    for (std::size_t l = 0; l < Mlp::kLayerCount; ++l) {
      const std::string where = "model layer " + std::string(layer_name(l));
      const std::size_t out = dst[l].out_width();
      const std::size_t in = dst[l].in_width();
      const Json& weight = layers[l].at("weight");
      if (!weight.is_array() || weight.size() != out) {
        throw IngestError(where + ": weight must have " + std::to_string(out) + " rows");
      }
      std::vector<double> values;
      values.reserve(out * in);
      for (std::size_t r = 0; r < out; ++r) {
        const auto row = finite_array(weight[r], in, where + " weight row " + std::to_string(r));
        values.insert(values.end(), row.begin(), row.end());
      }
      dst[l].weight = Matrix(out, in, std::move(values));
      dst[l].bias = finite_array(layers[l].at("bias"), out, where + " bias");
    }
    return net;
  } catch (const Json::exception& e) {
    throw IngestError(std::string("model: ") + e.what());
  } catch (const ContractError& e) {
    throw IngestError(std::string("model: ") + e.what());
  }
}

void save_mlp(const Mlp& net, const std::filesystem::path& path) { write_text_file(path, dump_json(mlp_to_json(net))); }

Mlp load_mlp(const std::filesystem::path& path) { return mlp_from_json(read_json_file(path)); }

}  // namespace hardinv
