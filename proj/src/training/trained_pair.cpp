#include "hardinv/training/trained_pair.hpp"

#include "hardinv/common/errors.hpp"
#include "hardinv/nncore/model_io.hpp"

namespace hardinv {

Json curve_to_json(const LossCurve& curve) {
  Json epochs = Json::array();
  Json train = Json::array();
  Json val = Json::array();
  for (const LossPoint& p : curve.points) {
    epochs.push_back(p.epoch);
    train.push_back(p.train_loss);
    val.push_back(p.val_loss);
  }
  return Json{{"epoch", epochs}, {"train_loss", train}, {"val_loss", val}};
}

LossCurve curve_from_json(const Json& doc) {
  const auto epochs = doc.at("epoch").get<std::vector<std::size_t>>();
  const auto train = doc.at("train_loss").get<std::vector<double>>();
  const auto val = doc.at("val_loss").get<std::vector<double>>();
  if (train.size() != epochs.size() || val.size() != epochs.size()) {
    throw IngestError("loss curve: column lengths differ");
  }
  LossCurve c;
  for (std::size_t i = 0; i < epochs.size(); ++i) c.points.push_back({epochs[i], train[i], val[i]});
  return c;
}

Json pair_to_json(const TrainedPair& pair) {
  return Json{{"schema_version", kModelSchemaVersion},
              {"kind", "trained_pair"},
              {"teacher", mlp_to_json(pair.teacher)},
              {"student", mlp_to_json(pair.student)},
              {"scaler", pair.scaler.to_json()},
              {"teacher_curve", curve_to_json(pair.teacher_curve)},
              {"student_curve", curve_to_json(pair.student_curve)},
              {"teacher_digest", pair.teacher_digest},
              {"student_digest", pair.student.digest()},
              {"config", pair.config},
              {"config_digest", pair.config_digest}};
}

TrainedPair pair_from_json(const Json& doc) {
  try {
    if (doc.value("kind", std::string()) != "trained_pair") throw IngestError("pair: kind must be trained_pair");
    TrainedPair pair{mlp_from_json(doc.at("teacher")),
                     mlp_from_json(doc.at("student")),
                     Scaler::from_json(doc.at("scaler")),
                     curve_from_json(doc.at("teacher_curve")),
                     curve_from_json(doc.at("student_curve")),
                     doc.at("teacher_digest").get<std::string>(),
                     doc.value("config", Json::object()),
                     doc.value("config_digest", std::string())};
    if (!pair.teacher_intact()) throw IngestError("pair: teacher parameters do not match teacher_digest");
    if (pair.scaler.feature_count() != pair.teacher.input_width() ||
        pair.student.output_width() != pair.teacher.input_width()) {
      throw IngestError("pair: scaler, teacher and student widths disagree");
    }
    pair.teacher.freeze();
    return pair;
  } catch (const Json::exception& e) {
    throw IngestError(std::string("pair: ") + e.what());
  }
}

void save_pair(const TrainedPair& pair, const std::filesystem::path& path) {
  write_text_file(path, dump_json(pair_to_json(pair)));
}

TrainedPair load_pair(const std::filesystem::path& path) { return pair_from_json(read_json_file(path)); }

}  // namespace hardinv
