// Copyright 2026  EIV Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <doctest.h>

#include <Eigen/Cholesky>

#include "eiv/common.hpp"
#include "eiv/compensate.hpp"
#include "eiv/io.hpp"
#include "test_util.hpp"

using namespace eiv;
using eivtest::TempDir;

namespace {

struct LabeledSet {
  std::vector<IVector> ivectors;
  std::vector<std::string> speakers;
};

// n_per samples per class around class means drawn from N(0, between^2 I),
// within-class noise N(0, within^2 I).
LabeledSet gaussian_classes(int n_classes, int n_per, int dim, double between,
                            double within, uint64_t seed) {
  Rng rng(seed);
  LabeledSet set;
  for (int k = 0; k < n_classes; ++k) {
    Vector mu(dim);
    for (int d = 0; d < dim; ++d) mu(d) = between * rng.gaussian();
    for (int i = 0; i < n_per; ++i) {
      IVector iv;
      iv.utterance_id = "spk" + std::to_string(k) + "_u" + std::to_string(i);
      iv.w.resize(dim);
      for (int d = 0; d < dim; ++d) iv.w(d) = mu(d) + within * rng.gaussian();
      set.ivectors.push_back(std::move(iv));
      set.speakers.push_back("spk" + std::to_string(k));
    }
  }
  return set;
}

// Population scatters normalized by the total count, the same convention the
// fitted transform documents; ridge is NOT included here.
void data_scatters(const LabeledSet& set, Matrix& sw, Matrix& sb) {
  const int dim = static_cast<int>(set.ivectors[0].w.size());
  const double n_total = static_cast<double>(set.ivectors.size());
  Vector global = Vector::Zero(dim);
  for (const auto& iv : set.ivectors) global += iv.w;
  global /= n_total;

  std::map<std::string, std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(set.speakers.size()); ++i)
    groups[set.speakers[static_cast<size_t>(i)]].push_back(i);

  sw = Matrix::Zero(dim, dim);
  sb = Matrix::Zero(dim, dim);
  for (const auto& [label, idx] : groups) {
    Vector mu = Vector::Zero(dim);
    for (int i : idx) mu += set.ivectors[static_cast<size_t>(i)].w;
    mu /= static_cast<double>(idx.size());
    for (int i : idx) {
      Vector d = set.ivectors[static_cast<size_t>(i)].w - mu;
      sw.noalias() += d * d.transpose();
    }
    Vector b = mu - global;
    sb.noalias() += static_cast<double>(idx.size()) * b * b.transpose();
  }
  sw /= n_total;
  sb /= n_total;
}

double angle_between(const Vector& a, const Vector& b) {
  const double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
  return std::acos(std::min(1.0, c));
}

// tr((V' Sw V)^-1 (V' Sb V)): the class-separation objective the projection
// is supposed to maximize.
double trace_ratio(const Matrix& v, const Matrix& sw, const Matrix& sb) {
  Matrix a = v.transpose() * sw * v;
  Matrix b = v.transpose() * sb * v;
  return a.ldlt().solve(b).trace();
}

}  // namespace

TEST_CASE("fit_lda: two classes recover the Fisher discriminant direction") {
  const int dim = 8;
  Rng rng(3);
  LabeledSet set;
  Vector mu1(dim), mu2(dim), scale(dim);
  for (int d = 0; d < dim; ++d) {
    mu1(d) = 2.0 * rng.gaussian();
    mu2(d) = 2.0 * rng.gaussian();
    scale(d) = 0.5 + 1.5 * rng.uniform();  // anisotropic within-class noise
  }
  for (int i = 0; i < 500; ++i) {
    for (int k = 0; k < 2; ++k) {
      IVector iv;
      iv.utterance_id = "u";
      iv.w.resize(dim);
      const Vector& mu = (k == 0) ? mu1 : mu2;
      for (int d = 0; d < dim; ++d) iv.w(d) = mu(d) + scale(d) * rng.gaussian();
      set.ivectors.push_back(std::move(iv));
      set.speakers.push_back(k == 0 ? "a" : "b");
    }
  }

  LdaTransform lda = fit_lda(set.ivectors, set.speakers, 1);
  REQUIRE(lda.out_dim() == 1);
  REQUIRE(lda.in_dim() == dim);

  Matrix sw, sb;
  data_scatters(set, sw, sb);
  sw.diagonal().array() += 1e-8 * sw.trace() / dim;

  // class means from the same sample
  Vector m1 = Vector::Zero(dim), m2 = Vector::Zero(dim);
  int c1 = 0, c2 = 0;
  for (size_t i = 0; i < set.ivectors.size(); ++i) {
    if (set.speakers[i] == "a") {
      m1 += set.ivectors[i].w;
      ++c1;
    } else {
      m2 += set.ivectors[i].w;
      ++c2;
    }
  }
  m1 /= c1;
  m2 /= c2;

  Vector fisher = sw.ldlt().solve(m1 - m2);
  CHECK(angle_between(lda.basis.col(0), fisher) < 1e-6);

  // the global mean is the sample mean
  Vector global = Vector::Zero(dim);
  for (const auto& iv : set.ivectors) global += iv.w;
  global /= static_cast<double>(set.ivectors.size());
  CHECK((lda.mean - global).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fit_lda: beats 100 random projections on the separation objective") {
  LabeledSet set = gaussian_classes(10, 20, 50, 5.0, 1.0, 9);
  LdaTransform lda = fit_lda(set.ivectors, set.speakers, 9);

  Matrix sw, sb;
  data_scatters(set, sw, sb);
  const double lda_score = trace_ratio(lda.basis, sw, sb);

  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix v(50, 9);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 9; ++j) v(i, j) = rng.gaussian();
    CHECK(lda_score > trace_ratio(v, sw, sb));
  }
}

TEST_CASE("fit_lda: basis whitens the within-class scatter") {
  LabeledSet set = gaussian_classes(6, 15, 12, 3.0, 1.0, 21);
  LdaTransform lda = fit_lda(set.ivectors, set.speakers, 5);

  Matrix sw, sb;
  data_scatters(set, sw, sb);
  sw.diagonal().array() += 1e-8 * sw.trace() / 12;

  Matrix gram = lda.basis.transpose() * sw * lda.basis;
  CHECK((gram - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);

  // between-class energy along the basis is non-increasing
  Matrix proj_b = lda.basis.transpose() * sb * lda.basis;
  for (int j = 1; j < 5; ++j) CHECK(proj_b(j, j) <= proj_b(j - 1, j - 1) + 1e-10);
}

TEST_CASE("fit_lda: strongest direction aligns with the most separated axis") {
  Rng rng(31);
  LabeledSet set;
  // planted class means: spread ~10 along axis 0, ~3 along axis 1 with the
  // two patterns chosen orthogonal, nothing elsewhere
  const double ax0[8] = {-7, -5, -3, -1, 1, 3, 5, 7};
  const double ax1[8] = {3, -3, -3, 3, 3, -3, -3, 3};
  for (int k = 0; k < 8; ++k) {
    Vector mu = Vector::Zero(6);
    mu(0) = 2.18 * ax0[k];
    mu(1) = ax1[k];
    for (int i = 0; i < 150; ++i) {
      IVector iv;
      iv.utterance_id = "u";
      iv.w = mu;
      for (int d = 0; d < 6; ++d) iv.w(d) += rng.gaussian();
      set.ivectors.push_back(std::move(iv));
      set.speakers.push_back("spk" + std::to_string(k));
    }
  }
  LdaTransform lda = fit_lda(set.ivectors, set.speakers, 2);
  Vector e0 = Vector::Unit(6, 0);
  Vector e1 = Vector::Unit(6, 1);
  CHECK(angle_between(lda.basis.col(0), e0) < 0.1);
  CHECK(angle_between(lda.basis.col(1), e1) < 0.2);
}

TEST_CASE("fit_lda: fills missing directions when classes are too few") {
  // 3 classes give S_b rank 2; ask for 5 output dims
  LabeledSet set = gaussian_classes(3, 30, 6, 4.0, 1.0, 41);
  LdaTransform lda = fit_lda(set.ivectors, set.speakers, 5);
  REQUIRE(lda.out_dim() == 5);
  CHECK(lda.basis.allFinite());

  Matrix sw, sb;
  data_scatters(set, sw, sb);
  sw.diagonal().array() += 1e-8 * sw.trace() / 6;

  // whitening holds on every column, including the filled ones
  Matrix gram = lda.basis.transpose() * sw * lda.basis;
  CHECK((gram - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);

  // filled columns carry (numerically) no between-class energy
  Matrix proj_b = lda.basis.transpose() * sb * lda.basis;
  const double scale = proj_b(0, 0);
  CHECK(proj_b(2, 2) < 1e-10 * scale);
  CHECK(proj_b(3, 3) < 1e-10 * scale);
  CHECK(proj_b(4, 4) < 1e-10 * scale);
}

TEST_CASE("fit_lda: input validation") {
  LabeledSet set = gaussian_classes(2, 5, 4, 2.0, 1.0, 51);
  CHECK_THROWS_AS(fit_lda({}, {}, 2), InputError);
  CHECK_THROWS_AS(fit_lda(set.ivectors, {"a"}, 2), InputError);
  CHECK_THROWS_AS(fit_lda(set.ivectors, set.speakers, 0), InputError);
  CHECK_THROWS_AS(fit_lda(set.ivectors, set.speakers, 5), InputError);  // > dim

  std::vector<std::string> one_class(set.speakers.size(), "same");
  CHECK_THROWS_AS(fit_lda(set.ivectors, one_class, 2), InputError);

  LabeledSet mixed = set;
  mixed.ivectors[3].w = Vector::Zero(7);
  CHECK_THROWS_AS(fit_lda(mixed.ivectors, mixed.speakers, 2), InputError);
}

TEST_CASE("fit_wccn: transformed within-class covariance is the identity") {
  Rng rng(61);
  const int dim = 5;
  // shared anisotropic within-class shape with eigenvalues in [1, 4]
  Matrix a = Matrix::Zero(dim, dim);
  for (int d = 0; d < dim; ++d) a(d, d) = 1.0 + 0.6 * d;
  // rotate it so the covariance is dense
  Matrix rot(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) rot(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Matrix> qr(rot);
  Matrix q = qr.householderQ();
  a = q * a;

  std::vector<Vector> embeddings;
  std::vector<std::string> speakers;
  for (int k = 0; k < 6; ++k) {
    Vector mu(dim);
    for (int d = 0; d < dim; ++d) mu(d) = 4.0 * rng.gaussian();
    for (int i = 0; i < 12; ++i) {
      Vector z(dim);
      for (int d = 0; d < dim; ++d) z(d) = rng.gaussian();
      embeddings.push_back(mu + a * z);
      speakers.push_back("spk" + std::to_string(k));
    }
  }

  WccnTransform wccn = fit_wccn(embeddings, speakers);
  const Matrix& b = wccn.chol;

  // recompute the averaged within-class population covariance
  std::map<std::string, std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(speakers.size()); ++i)
    groups[speakers[static_cast<size_t>(i)]].push_back(i);
  Matrix w = Matrix::Zero(dim, dim);
  for (const auto& [label, idx] : groups) {
    Vector mu = Vector::Zero(dim);
    for (int i : idx) mu += embeddings[static_cast<size_t>(i)];
    mu /= static_cast<double>(idx.size());
    Matrix cov = Matrix::Zero(dim, dim);
    for (int i : idx) {
      Vector d = embeddings[static_cast<size_t>(i)] - mu;
      cov.noalias() += d * d.transpose();
    }
    w += cov / static_cast<double>(idx.size());
  }
  w /= static_cast<double>(groups.size());

  // exact identity once the documented ridge is included
  Matrix w_ridged = w;
  w_ridged.diagonal().array() += 1e-8 * w.trace() / dim;
  Matrix gram_exact = b.transpose() * w_ridged * b;
  CHECK((gram_exact - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-10);

  // and identity to ridge precision on the raw covariance
  Matrix gram = b.transpose() * w * b;
  CHECK((gram - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-6);

  // B is upper triangular (inverse transpose of a lower Cholesky factor)
  for (int i = 1; i < dim; ++i)
    for (int j = 0; j < i; ++j) CHECK(b(i, j) == 0.0);
}

TEST_CASE("fit_wccn: rejects degenerate inputs") {
  CHECK_THROWS_AS(fit_wccn({}, {}), InputError);

  std::vector<Vector> embs = {Vector::Ones(3), Vector::Zero(3)};
  CHECK_THROWS_AS(fit_wccn(embs, {"a"}), InputError);

  std::vector<Vector> skew = {Vector::Ones(3), Vector::Zero(4)};
  CHECK_THROWS_AS(fit_wccn(skew, {"a", "b"}), InputError);

  // singleton classes give a zero within-class covariance: singular
  std::vector<Vector> singles = {Vector::Ones(3), 2.0 * Vector::Ones(3)};
  CHECK_THROWS_AS(fit_wccn(singles, {"a", "b"}), InputError);
}

TEST_CASE("apply_compensation: composes the affine maps in order") {
  Rng rng(71);
  LdaTransform lda;
  lda.basis.resize(6, 3);
  lda.mean.resize(6);
  for (int i = 0; i < 6; ++i) {
    lda.mean(i) = rng.gaussian();
    for (int j = 0; j < 3; ++j) lda.basis(i, j) = rng.gaussian();
  }
  WccnTransform wccn;
  wccn.chol.resize(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) wccn.chol(i, j) = rng.gaussian();

  IVector iv;
  iv.utterance_id = "trial-7";
  iv.w.resize(6);
  for (int i = 0; i < 6; ++i) iv.w(i) = rng.gaussian();

  CompEmbedding e = apply_compensation(iv, lda, wccn);
  Vector expected =
      wccn.chol.transpose() * (lda.basis.transpose() * (iv.w - lda.mean));
  CHECK((e.e - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(e.utterance_id == "trial-7");
  CHECK(e.speaker.empty());
  CHECK(e.emotion.empty());

  IVector wrong;
  wrong.w = Vector::Zero(4);
  CHECK_THROWS_AS(apply_compensation(wrong, lda, wccn), InputError);

  WccnTransform skew;
  skew.chol = Matrix::Identity(5, 5);
  CHECK_THROWS_AS(apply_compensation(iv, lda, skew), InputError);
}

TEST_CASE("lda/wccn files: round trips and corruption handling") {
  TempDir tmp("comp_io");
  LabeledSet set = gaussian_classes(4, 10, 7, 3.0, 1.0, 81);
  LdaTransform lda = fit_lda(set.ivectors, set.speakers, 3);

  write_lda(tmp.file("lda.eivb"), lda);
  LdaTransform rl = read_lda(tmp.file("lda.eivb"));
  CHECK(rl.basis == lda.basis);
  CHECK(rl.mean == lda.mean);

  std::vector<Vector> embs;
  std::vector<std::string> spk;
  for (size_t i = 0; i < set.ivectors.size(); ++i) {
    embs.push_back(lda.basis.transpose() * (set.ivectors[i].w - lda.mean));
    spk.push_back(set.speakers[i]);
  }
  WccnTransform wccn = fit_wccn(embs, spk);
  write_wccn(tmp.file("wccn.eivb"), wccn);
  WccnTransform rw = read_wccn(tmp.file("wccn.eivb"));
  CHECK(rw.chol == wccn.chol);

  write_matrix(tmp.file("mat.eivb"), Matrix::Ones(2, 2));
  CHECK_THROWS_AS(read_lda(tmp.file("mat.eivb")), FormatError);
  CHECK_THROWS_AS(read_wccn(tmp.file("mat.eivb")), FormatError);

  write_blob(tmp.file("lda1.eivb"), Blob{"LDA", {lda.basis}});
  CHECK_THROWS_AS(read_lda(tmp.file("lda1.eivb")), FormatError);

  // mean with the wrong length
  write_blob(tmp.file("lda_skew.eivb"),
             Blob{"LDA", {lda.basis, Matrix::Zero(3, 1)}});
  CHECK_THROWS_AS(read_lda(tmp.file("lda_skew.eivb")), FormatError);

  write_blob(tmp.file("wccn_rect.eivb"), Blob{"WCCN", {Matrix::Zero(3, 4)}});
  CHECK_THROWS_AS(read_wccn(tmp.file("wccn_rect.eivb")), FormatError);
}
