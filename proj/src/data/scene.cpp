#include <string>

#include "ucgan/data/dataset.hpp"
#include "ucgan/error.hpp"

namespace ucgan::data {

namespace {

std::string dims(const RasterImage& img) {
  return std::to_string(img.width) + "x" + std::to_string(img.height) + "x" + std::to_string(img.bands);
}

}  // namespace

void ScenePair::validate() const {
  pan.validate();
  lrms.validate();
  if (pan.bands != 1) throw ContractError("pair " + id + ": PAN must have 1 band, got " + dims(pan));
  if (lrms.bands != 4) throw ContractError("pair " + id + ": LR MS must have 4 bands, got " + dims(lrms));
  if (pan.width != 4 * lrms.width || pan.height != 4 * lrms.height) {
    throw ContractError("pair " + id + ": PAN " + dims(pan) + " is not 4x LR MS " + dims(lrms));
  }
  if (reference) {
    reference->validate();
    if (reference->bands != 4 || reference->width != pan.width || reference->height != pan.height) {
      throw ContractError("pair " + id + ": reference " + dims(*reference) + " does not match PAN " + dims(pan));
    }
  }
}

std::string to_string(Mode mode) { return mode == Mode::wald ? "wald" : "full_scale"; }

Mode parse_mode(const std::string& text) {
  if (text == "wald") return Mode::wald;
  if (text == "full_scale" || text == "full") return Mode::full_scale;
  throw ContractError("unknown dataset mode '" + text + "' (expected full_scale or wald)");
}

void DatasetSpec::validate() const {
  for (auto [name, side] : {std::pair{"train_patch", train_patch}, std::pair{"test_patch", test_patch}}) {
    if (side == 0 || side % 4 != 0) {
      throw ContractError(std::string(name) + " must be a positive multiple of 4, got " + std::to_string(side));
    }
    if (mode == Mode::wald && side % 16 != 0) {
      throw ContractError(std::string(name) + " must be a multiple of 16 in wald mode, got " + std::to_string(side));
    }
  }
}

}  // namespace ucgan::data
