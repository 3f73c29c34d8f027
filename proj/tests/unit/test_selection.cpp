#include <doctest.h>

#include "mer/data/dataset.hpp"
#include "mer/selection/feature_matrix.hpp"
#include "mer/selection/selection.hpp"
#include "mer/util/random.hpp"

#include <algorithm>
#include <cmath>

using namespace mer;
using namespace mer::selection;

namespace {

FeatureMatrix block(Rng& rng, Index n, Index d, Modality tag, const std::string& prefix) {
  FeatureMatrix m;
  m.values.resize(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m.values(i, j) = rng.normal();
  for (Index j = 0; j < d; ++j) {
    m.names.push_back(prefix + std::to_string(j));
    m.tags.push_back(tag);
  }
  for (Index i = 0; i < n; ++i) m.row_ids.push_back("s" + std::to_string(i));
  return m;
}

data::AudioFeatureVector random_audio(Rng& rng) {
  data::AudioFeatureVector v;
  v.acousticness = rng.uniform();
  v.danceability = rng.uniform();
  v.energy = rng.uniform();
  v.instrumentalness = rng.uniform();
  v.liveness = rng.uniform();
  v.loudness = rng.uniform(-30.0, 0.0);
  v.speechiness = rng.uniform();
  v.tempo = rng.uniform(60.0, 180.0);
  v.valence = rng.uniform();
  v.mode = rng.uniform() < 0.6 ? 1 : 0;
  v.key = static_cast<int>(rng.below(13)) - 1;
  return v;
}

FeatureMatrix audio_block(Rng& rng, Index n) {
  FeatureMatrix m;
  m.values.resize(n, data::kAudioColumns);
  for (Index i = 0; i < n; ++i) {
    m.values.row(i) = data::dummy_encode_audio(random_audio(rng)).transpose();
    m.row_ids.push_back("s" + std::to_string(i));
  }
  for (const auto& name : data::audio_column_names()) {
    m.names.push_back(name);
    m.tags.push_back(Modality::audio);
  }
  return m;
}

Vector col(const FeatureMatrix& m, const std::string& name) { return m.values.col(m.column(name)); }

bool contains(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

}  // namespace

TEST_CASE("fuse concatenates aligned parts") {
  Rng rng(1);
  const auto audio = audio_block(rng, 40);
  const auto sentiment = block(rng, 40, 4, Modality::sentiment, "vader_");
  const auto tfidf = block(rng, 40, 100, Modality::tfidf, "tfidf_pc");
  const auto fused = fuse({audio, sentiment, tfidf});
  CHECK(fused.cols() == 127);
  CHECK(fused.names[23] == "vader_0");
  CHECK(fused.tags[30] == Modality::tfidf);
  fused.validate();

  const auto single = fuse({audio});
  CHECK(single.values == audio.values);
  CHECK(single.names == audio.names);

  const auto left = fuse({fuse({audio, sentiment}), tfidf});
  const auto right = fuse({audio, fuse({sentiment, tfidf})});
  CHECK(left.values == right.values);
  CHECK(left.names == right.names);
  CHECK(left.values == fused.values);

  std::vector<Index> perm(40);
  for (Index i = 0; i < 40; ++i) perm[static_cast<std::size_t>(i)] = 39 - i;
  CHECK_THROWS_AS(fuse({audio, sentiment.select_rows(perm)}), InvalidArgument);
  CHECK_THROWS_AS(fuse({audio, audio}), InvalidArgument);
}

TEST_CASE("feature CSV round trip") {
  Rng rng(2);
  auto m = fuse({block(rng, 7, 3, Modality::tfidf, "tfidf_pc"), block(rng, 7, 2, Modality::xanew, "xanew_val_pc")});
  m.values(0, 0) = 1.0 / 3.0;
  m.row_ids[2] = "id,with,commas";
  const auto back = parse_feature_csv(to_csv(m));
  CHECK(back.values == m.values);
  CHECK(back.names == m.names);
  CHECK(back.tags == m.tags);
  CHECK(back.row_ids == m.row_ids);
  CHECK(to_csv(back) == to_csv(m));
  CHECK_THROWS_AS(parse_feature_csv("id,tfidf/a\n"), IngestError);
  CHECK_THROWS_AS(parse_feature_csv("song_id,a\n"), IngestError);
  CHECK_THROWS_AS(parse_feature_csv("song_id,tfidf/a\nx,nan\n"), InvalidArgument);
}

TEST_CASE("significance selection keeps the generating audio feature") {
  Rng rng(3);
  const auto audio = audio_block(rng, 400);
  Vector y = 3.0 * col(audio, "danceability");
  for (Index i = 0; i < y.size(); ++i) y(i) += 0.3 * rng.normal();
  const Vector targets[] = {y};
  const auto s = select_significant_audio(audio, targets, 0.001);
  CHECK(contains(s.columns, "danceability"));
  CHECK(s.columns.size() < 4);

  const auto all = select_significant_audio(audio, targets, 1.0);
  CHECK(all.columns.size() == 23);

  CHECK_THROWS_AS(select_significant_audio(audio.select_rows(std::vector<Index>{0, 1, 2, 3, 4}), targets, 0.05),
                  InvalidArgument);
}

TEST_CASE("significance selection unions targets and treats keys as a group") {
  Rng rng(4);
  const auto audio = audio_block(rng, 500);
  Vector valence = 0.8 * col(audio, "energy");
  Vector arousal = 0.5 * col(audio, "key_D") + 0.6 * col(audio, "mode");
  for (Index i = 0; i < valence.size(); ++i) {
    valence(i) += 0.1 * rng.normal() + 2.0;
    arousal(i) += 0.1 * rng.normal() - 1.0;
  }
  const Vector targets[] = {valence, arousal};
  const auto s = select_significant_audio(audio, targets, 0.001);
  CHECK(contains(s.columns, "energy"));
  CHECK(contains(s.columns, "mode"));
  CHECK(contains(s.columns, "key_D"));
  CHECK(contains(s.columns, "key_none"));
  CHECK(s.columns.size() == 15);
  CHECK(s.provenance["targets"].size() == 2);
}

TEST_CASE("significance selection rarely fires on pure noise") {
  int false_positives = 0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    Rng rng(1000 + rep);
    const auto audio = audio_block(rng, 300);
    Vector a(300), b(300);
    for (Index i = 0; i < 300; ++i) {
      a(i) = 5.0 + rng.normal();
      b(i) = -3.0 + rng.normal();
    }
    const Vector targets[] = {a, b};
    false_positives += static_cast<int>(select_significant_audio(audio, targets, 1e-4).columns.size());
  }
  CHECK(false_positives <= 1);
}

TEST_CASE("lyric combination search") {
  Rng rng(5);
  const Index n = 300;
  const auto lyrics = fuse({block(rng, n, 20, Modality::tfidf, "tfidf_pc"),
                            block(rng, n, 10, Modality::xanew, "xanew_val_pc"),
                            block(rng, n, 4, Modality::sentiment, "vader_")});
  Vector valence = 0.8 * col(lyrics, "vader_3") + 0.4 * col(lyrics, "vader_2");
  Vector arousal = -0.6 * col(lyrics, "vader_0") + 0.3 * col(lyrics, "vader_3");
  for (Index i = 0; i < n; ++i) {
    valence(i) += 0.2 * rng.normal();
    arousal(i) += 0.2 * rng.normal();
  }
  std::vector<Index> train, val;
  for (Index i = 0; i < n; ++i) (i < 200 ? train : val).push_back(i);
  auto pick = [](const Vector& y, const std::vector<Index>& rows) {
    Vector out(static_cast<Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) out(static_cast<Index>(k)) = y(rows[k]);
    return out;
  };
  const Vector yt[] = {pick(valence, train), pick(arousal, train)};
  const Vector yv[] = {pick(valence, val), pick(arousal, val)};
  const auto r = search_lyric_combination(lyrics, train, val, yt, yv, 7, 1);
  REQUIRE(r.rows.size() == 7);
  CHECK(r.rows[6].name == "tfidf+anew+vader");
  CHECK(r.rows[0].n_features == 20);
  for (const auto& row : r.rows)
    for (double s : row.scores) CHECK(std::isfinite(s));
  const auto& best = r.rows[r.best];
  CHECK(best.name.find("vader") != std::string::npos);
  CHECK(r.best == 2);
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    if (r.rows[k].name.find("vader") != std::string::npos) CHECK(r.rows[k].aggregate < r.rows[0].aggregate);
  }
  CHECK(r.subset.columns.size() == 4);

  const auto again = search_lyric_combination(lyrics, train, val, yt, yv, 7, 2);
  for (std::size_t k = 0; k < 7; ++k) CHECK(again.rows[k].scores == r.rows[k].scores);
}

TEST_CASE("recursive feature elimination") {
  Rng rng(6);
  auto x = block(rng, 80, 2, Modality::audio, "x");
  const Vector y = x.values.col(1);
  auto r = rfe(x, y, 1);
  CHECK(r.survivors.columns == std::vector<std::string>{"x1"});
  CHECK(r.elimination_order == std::vector<std::string>{"x0"});

  auto wide = block(rng, 120, 12, Modality::tfidf, "f");
  Vector z = 2.0 * wide.values.col(3) - 1.0 * wide.values.col(7) + 0.5 * wide.values.col(10);
  for (Index i = 0; i < z.size(); ++i) z(i) += 0.05 * rng.normal();
  r = rfe(wide, z, 3);
  CHECK(r.survivors.columns.size() == 3);
  CHECK(r.elimination_order.size() == 9);
  CHECK(contains(r.survivors.columns, "f3"));
  CHECK(contains(r.survivors.columns, "f7"));
  CHECK(contains(r.survivors.columns, "f10"));
  CHECK(r.elimination_order.back() != "f3");
  CHECK(rfe(wide, z, 3).elimination_order == r.elimination_order);

  const auto none = rfe(wide, z, 12);
  CHECK(none.elimination_order.empty());
  CHECK(none.survivors.columns == wide.names);
  CHECK_THROWS_AS(rfe(wide, z, 0), InvalidArgument);
  CHECK_THROWS_AS(rfe(wide, z, 13), InvalidArgument);
}
