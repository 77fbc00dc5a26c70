#pragma once

#include <map>
#include <vector>

#include "afl/model.hpp"
#include "afl/types.hpp"

namespace afl {

// Which value function a run uses.
enum class ValueKind { kLoss, kCount };

struct Valuation {
  Scalar value = 0.0;
  int round_computed = 0;  // round whose broadcast model produced this value
};

// Server-side table of every client's (possibly stale) valuation. Entries
// refresh only when a client is selected, so round_computed lags behind
// current_round for everyone else.
struct ValuationTable {
  std::vector<Valuation> entries;  // indexed by client id
  int current_round = 0;

  int num_clients() const { return static_cast<int>(entries.size()); }
};

// All clients at the same constant 0, stamped round 0, so the first selection
// round is uniform.
ValuationTable initial_table(int num_clients);

// (1/sqrt(n)) * sum of per-example losses. The sum rather than the mean makes
// equally-hard clients with more data worth more.
Scalar loss_valuation(const ClientDataset& data, const ModelParams& model);

// Same normalization applied to an externally supplied per-example loss list
// (e.g. losses that were clipped first).
Scalar loss_valuation_from_losses(const Vector& losses);

// Number of examples whose loss strictly exceeds threshold. Adding or
// removing one example moves this by at most 1.
int count_high_loss_valuation(const ClientDataset& data, const ModelParams& model,
                              Scalar threshold);

// Default count pivot: the loss of the uninformative model, ln 2.
inline constexpr Scalar kDefaultCountThreshold = 0.6931471805599453;

// Selected clients get their fresh values, stamped with the round whose model
// produced them (the table's current round); everyone else keeps both value
// and stamp. new_round must be current_round + 1 and fresh must have exactly
// the selected ids as keys.
ValuationTable update_valuation_table(const ValuationTable& table,
                                      const std::vector<int>& selected,
                                      const std::map<int, Scalar>& fresh,
                                      int new_round);

}  // namespace afl
