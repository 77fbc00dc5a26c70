#include "afl/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace afl {

ValuationTable initial_table(int num_clients) {
  if (num_clients < 1) throw std::invalid_argument("initial_table: need at least one client");
  ValuationTable table;
  table.entries.assign(static_cast<std::size_t>(num_clients), Valuation{0.0, 0});
  table.current_round = 0;
  return table;
}

Scalar loss_valuation(const ClientDataset& data, const ModelParams& model) {
  return loss_valuation_from_losses(per_example_losses(model, data));
}

Scalar loss_valuation_from_losses(const Vector& losses) {
  if (losses.size() == 0) throw std::invalid_argument("loss_valuation: empty loss list");
  Scalar sum = 0.0;
  for (Index i = 0; i < losses.size(); ++i) sum += losses(i);
  return sum / std::sqrt(static_cast<Scalar>(losses.size()));
}

int count_high_loss_valuation(const ClientDataset& data, const ModelParams& model,
                              Scalar threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("count_high_loss_valuation: threshold must be positive");
  const Vector losses = per_example_losses(model, data);
  int count = 0;
  for (Index i = 0; i < losses.size(); ++i) {
    if (losses(i) > threshold) ++count;
  }
  return count;
}

ValuationTable update_valuation_table(const ValuationTable& table,
                                      const std::vector<int>& selected,
                                      const std::map<int, Scalar>& fresh,
                                      int new_round) {
  if (new_round != table.current_round + 1) {
    throw std::invalid_argument("update_valuation_table: new_round " + std::to_string(new_round) +
                                " is not current_round + 1 (" +
                                std::to_string(table.current_round + 1) + ")");
  }
  if (fresh.size() != selected.size()) {
    throw std::invalid_argument("update_valuation_table: fresh values do not match selected set");
  }
  for (int id : selected) {
    if (id < 0 || id >= table.num_clients()) {
      throw std::invalid_argument("update_valuation_table: client id " + std::to_string(id) +
                                  " out of range");
    }
    if (fresh.find(id) == fresh.end()) {
      throw std::invalid_argument("update_valuation_table: no fresh value for selected client " +
                                  std::to_string(id));
    }
  }
  // equal sizes + selected covered by keys, so distinct selected ids <=> equal sets
  std::vector<int> dedup = selected;
  std::sort(dedup.begin(), dedup.end());
  if (std::adjacent_find(dedup.begin(), dedup.end()) != dedup.end()) {
    throw std::invalid_argument("update_valuation_table: selected ids are not distinct");
  }

  ValuationTable out = table;
  for (int id : selected) {
    const Scalar value = fresh.at(id);
    if (!std::isfinite(value)) {
      throw NumericError("update_valuation_table: non-finite valuation for client " +
                         std::to_string(id));
    }
    out.entries[static_cast<std::size_t>(id)] = Valuation{value, table.current_round};
  }
  out.current_round = new_round;
  return out;
}

}  // namespace afl
