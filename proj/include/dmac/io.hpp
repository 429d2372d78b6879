#pragma once

#include <string>
#include <vector>

#include "dmac/nn.hpp"

namespace dmac {

/// Header `V_a,P_a,thrust_N`. The split is not stored; it is rebuilt from
/// the seed.
void WriteDatasetCsv(const std::string& path, const TrainingDataset& dataset);
TrainingDataset ReadDatasetCsv(const std::string& path);

/// {"w1","b1","w2","b2","w3","b3","sigma":"tansig","input_order":[...]}
/// with matrices as arrays of rows.
void WriteModelJson(const std::string& path, const NeuralOutputModel& model);
NeuralOutputModel ReadModelJson(const std::string& path);

/// Header `epoch,train_mse,validation_mse,test_mse,mu`.
void WriteHistoryCsv(const std::string& path,
                     const std::vector<EpochStats>& history);

}  // namespace dmac
