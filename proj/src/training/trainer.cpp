#include <condition_variable>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "remaster/errors.hpp"
#include "remaster/training.hpp"

namespace remaster {

void TrainConfig::validate() const {
  if (phase1_iters < 0 || phase2_iters < 0) throw std::invalid_argument("iteration counts must be non-negative");
  if (batch < 1) throw std::invalid_argument("batch must be at least 1");
  if (validation_samples < 1) throw std::invalid_argument("need at least one validation sample");
  if (samples.crop_size < 16 || samples.crop_size % 16 != 0) {
    throw std::invalid_argument("crop size must be a positive multiple of 16");
  }
  if (samples.clip_length < 1) throw std::invalid_argument("clip length must be at least 1");
  if (samples.max_references < 0) throw std::invalid_argument("max references must be non-negative");
  if (producers < 0) throw std::invalid_argument("producer count must be non-negative");
  loss.validate();
}

std::int64_t TrainConfig::validation_interval(std::int64_t iters) { return std::max<std::int64_t>(1, iters / 20); }

// ---------------------------------------------------------------------------

Trainer::Trainer(RemasterModel& model, LossConfig loss, AdadeltaConfig opt)
    : model_(model),
      loss_(loss),
      pre_opt_(model.params().trainable(RemasterModel::kPreprocessPrefix), opt),
      sr_opt_(model.params().trainable(RemasterModel::kSourceRefPrefix), opt) {
  loss_.validate();
}

double Trainer::step_separate(const std::vector<TrainingSample>& batch) {
  if (batch.empty()) throw DataError("empty batch");
  const float w = 1.0f / static_cast<float>(batch.size());
  const ForwardContext ctx{.training = true};
  pre_opt_.zero_grad();
  sr_opt_.zero_grad();
  double total = 0.0;
  for (const auto& s : batch) {
    Tensor lp = l1_loss(model_.preprocess().forward(s.x, ctx), s.y_l);
    total += lp.item();
    scale(lp, w).backward();
    // The colorization network learns from the clean luminance here.
    Tensor ls = l1_loss(model_.srnet().forward(s.y_l, s.z, ctx), s.y_ab);
    total += ls.item();
    scale(ls, w).backward();
  }
  pre_opt_.step();
  sr_opt_.step();
  return total * w;
}

double Trainer::step_joint(const std::vector<TrainingSample>& batch) {
  if (batch.empty()) throw DataError("empty batch");
  const float w = 1.0f / static_cast<float>(batch.size());
  const ForwardContext ctx{.training = true};
  pre_opt_.zero_grad();
  sr_opt_.zero_grad();
  double total = 0.0;
  for (const auto& s : batch) {
    const auto out = model_.forward(s.x, s.z, ctx);
    Tensor loss = joint_loss(out.luma, out.chroma, s.y_l, s.y_ab, loss_);
    total += loss.item();
    scale(loss, w).backward();
  }
  pre_opt_.step();
  sr_opt_.step();
  return total * w;
}

double Trainer::evaluate(const std::vector<TrainingSample>& samples) const {
  if (samples.empty()) throw DataError("nothing to evaluate");
  NoGradGuard guard;
  const ForwardContext ctx{.training = false};
  double total = 0.0;
  for (const auto& s : samples) {
    const auto out = model_.forward(s.x, s.z, ctx);
    total += joint_loss(out.luma, out.chroma, s.y_l, s.y_ab, loss_).item();
  }
  return total / static_cast<double>(samples.size());
}

// ---------------------------------------------------------------------------

namespace {

// Sample i is a pure function of (seed, i), so producers may run in any
// order while the consumer still sees a seed-determined stream.
class SampleStream {
 public:
  SampleStream(const VideoDataset& data, const NoiseBank& bank, const SampleOptions& opt, std::uint64_t seed,
               std::int64_t total, int producers, std::int64_t capacity)
      : data_(data), bank_(bank), opt_(opt), seed_(seed), total_(total), capacity_(capacity) {
    for (int i = 0; i < producers; ++i) workers_.emplace_back([this] { produce(); });
  }

  ~SampleStream() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : workers_) t.join();
  }

  TrainingSample next() {
    const std::int64_t want = consumed_;
    if (workers_.empty()) {
      ++consumed_;
      return make(want);
    }
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return ready_.count(want) || error_; });
    if (error_) std::rethrow_exception(error_);
    TrainingSample s = std::move(ready_.at(want));
    ready_.erase(want);
    ++consumed_;
    lock.unlock();
    cv_.notify_all();
    return s;
  }

 private:
  TrainingSample make(std::int64_t i) const { return make_sample(data_, bank_, opt_, Rng::mix(seed_, static_cast<std::uint64_t>(i))); }

  void produce() {
    for (;;) {
      std::int64_t i;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stop_ || (claimed_ < total_ && claimed_ < consumed_ + capacity_); });
        if (stop_ || claimed_ >= total_) return;
        i = claimed_++;
      }
      try {
        TrainingSample s = make(i);
        std::lock_guard lock(mu_);
        ready_.emplace(i, std::move(s));
      } catch (...) {
        std::lock_guard lock(mu_);
        if (!error_) error_ = std::current_exception();
      }
      cv_.notify_all();
    }
  }

  const VideoDataset& data_;
  const NoiseBank& bank_;
  SampleOptions opt_;
  std::uint64_t seed_;
  std::int64_t total_, capacity_;
  std::int64_t claimed_ = 0, consumed_ = 0;
  std::map<std::int64_t, TrainingSample> ready_;
  std::exception_ptr error_;
  bool stop_ = false;
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::thread> workers_;
};

// Validation samples come from a separate stream of the same seed.
constexpr std::uint64_t kValidationStream = 1ull << 62;

}  // namespace

TrainResult train(RemasterModel& model, const VideoDataset& train_set, const VideoDataset& val_set,
                  const NoiseBank& bank, const TrainConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  if (train_set.empty()) throw DataError("training set is empty");
  const VideoDataset& held_out = val_set.empty() ? train_set : val_set;

  std::vector<TrainingSample> validation;
  for (std::int64_t k = 0; k < cfg.validation_samples; ++k) {
    validation.push_back(
        make_sample(held_out, bank, cfg.samples, Rng::mix(cfg.seed, kValidationStream + static_cast<std::uint64_t>(k))));
  }

  Trainer trainer(model, cfg.loss, cfg.optimizer);
  TrainResult result;
  result.best_val_loss = trainer.evaluate(validation);
  auto best = model.params().snapshot();

  const std::int64_t total = (cfg.phase1_iters + cfg.phase2_iters) * cfg.batch;
  SampleStream stream(train_set, bank, cfg.samples, cfg.seed, total, cfg.producers, 2 * cfg.batch + 2);

  std::int64_t iter = 0;
  for (int phase = 1; phase <= 2; ++phase) {
    const std::int64_t iters = phase == 1 ? cfg.phase1_iters : cfg.phase2_iters;
    const std::int64_t every = TrainConfig::validation_interval(iters);
    for (std::int64_t i = 1; i <= iters; ++i) {
      std::vector<TrainingSample> batch;
      for (std::int64_t b = 0; b < cfg.batch; ++b) batch.push_back(stream.next());
      LogRow row;
      row.iter = ++iter;
      row.phase = phase;
      row.train_loss = phase == 1 ? trainer.step_separate(batch) : trainer.step_joint(batch);
      if (i % every == 0 || i == iters) {
        row.val_loss = trainer.evaluate(validation);
        if (row.val_loss < result.best_val_loss) {
          result.best_val_loss = row.val_loss;
          result.best_iter = row.iter;
          best = model.params().snapshot();
        }
      }
      result.log.push_back(row);
      if (progress) progress(row);
    }
  }
  model.params().restore(best);
  return result;
}

void write_log_csv(const std::vector<LogRow>& log, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot write training log " + path.string());
  f << "iter,phase,train_loss,val_loss\n";
  f.precision(9);
  for (const auto& r : log) {
    f << r.iter << ',' << r.phase << ',' << r.train_loss << ',';
    if (r.val_loss >= 0) f << r.val_loss;
    f << '\n';
  }
}

}  // namespace remaster
