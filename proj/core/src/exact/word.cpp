#include "pingpong/exact/word.hpp"

#include <sstream>

#include "pingpong/error.hpp"
#include "pingpong/exact/linalg.hpp"

namespace pingpong::exact {

Word Word::reduced() const {
  std::vector<Letter> out;
  out.reserve(letters_.size());
  for (auto const& l : letters_) {
    if (!out.empty() && out.back().gen == l.gen && out.back().sign == -l.sign) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return Word(std::move(out));
}

bool Word::is_reduced() const {
  for (std::size_t i = 1; i < letters_.size(); ++i) {
    if (letters_[i].gen == letters_[i - 1].gen && letters_[i].sign == -letters_[i - 1].sign) {
      return false;
    }
  }
  return true;
}

Word Word::inverse() const {
  std::vector<Letter> out(letters_.rbegin(), letters_.rend());
  for (auto& l : out) l.sign = -l.sign;
  return Word(std::move(out));
}

Word Word::power(long e) const {
  Word base = e < 0 ? inverse() : *this;
  unsigned long const k = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  std::vector<Letter> out;
  out.reserve(base.length() * k);
  for (unsigned long i = 0; i < k; ++i) {
    out.insert(out.end(), base.letters_.begin(), base.letters_.end());
  }
  return Word(std::move(out)).reduced();
}

Word& Word::operator*=(const Word& o) {
  letters_.insert(letters_.end(), o.letters_.begin(), o.letters_.end());
  return *this;
}

std::string Word::to_string() const {
  if (letters_.empty()) return "e";
  std::ostringstream os;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i > 0) os << ' ';
    os << 'g' << letters_[i].gen;
    if (letters_[i].sign < 0) os << "^-1";
  }
  return os.str();
}

void check_group_element(const SMatrix& a, const PrimeSupport& support) {
  if (!a.is_square() || a.rows() == 0) {
    throw Error(ErrorCode::BadMatrix, "generator is not a nonempty square matrix");
  }
  for (auto const& x : a.data()) {
    if (!support.supports(x)) {
      throw Error(ErrorCode::BadMatrix,
                  "entry " + exact::to_string(x) + " has a denominator outside the prime support");
    }
  }
  Rational const d = det(a);
  if (d != 1) {
    throw Error(ErrorCode::BadMatrix, "determinant is " + exact::to_string(d) + ", expected 1");
  }
}

GenSet::GenSet(std::vector<SMatrix> generators, PrimeSupport support, bool symmetric_closure)
    : support_(std::move(support)), symmetric_(symmetric_closure) {
  if (generators.empty()) throw Error(ErrorCode::ParseError, "empty generator list");
  dim_ = generators.front().rows();
  for (auto const& g : generators) {
    if (g.rows() != dim_ || g.cols() != dim_) {
      throw Error(ErrorCode::BadMatrix, "generators have inconsistent dimensions");
    }
    check_group_element(g, support_);
  }
  SMatrix const id = SMatrix::identity(dim_);
  auto find = [this](const SMatrix& m) {
    for (std::size_t i = 0; i < gens_.size(); ++i) {
      if (gens_[i] == m) return i;
    }
    return gens_.size();
  };
  gens_.push_back(id);
  for (auto& g : generators) {
    if (find(g) == gens_.size()) gens_.push_back(std::move(g));
  }
  if (symmetric_closure) {
    std::size_t const base = gens_.size();
    for (std::size_t i = 0; i < base; ++i) {
      SMatrix inv = exact::inverse(gens_[i]);
      if (find(inv) == gens_.size()) gens_.push_back(std::move(inv));
    }
  }
  has_identity_ = true;
  identity_ = 0;
  for (auto const& g : gens_) inverse_mats_.push_back(exact::inverse(g));
  for (auto const& inv : inverse_mats_) inverse_.push_back(find(inv));
  if (!symmetric_closure) {
    symmetric_ = true;
    for (std::size_t i = 0; i < gens_.size(); ++i) {
      if (inverse_[i] == gens_.size()) symmetric_ = false;
    }
  }
}

GenSet GenSet::conjugated(const SMatrix& g) const {
  GenSet out = *this;
  SMatrix const gi = exact::inverse(g);
  for (auto& s : out.gens_) s = gi * s * g;
  for (auto& s : out.inverse_mats_) s = gi * s * g;
  return out;
}

SMatrix word_eval(const GenSet& sigma, const Word& w) {
  SMatrix acc = SMatrix::identity(sigma.dim());
  for (auto const& l : w.letters()) {
    if (l.gen >= sigma.size()) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "generator index " + std::to_string(l.gen) + " >= " + std::to_string(sigma.size()));
    }
    acc = acc * (l.sign > 0 ? sigma[l.gen] : sigma.inverse_matrix(l.gen));
  }
  return acc;
}

std::string canonical_key(const QMatrix& a) {
  std::string key;
  for (auto const& x : a.data()) {
    key += x.get_str();
    key += ',';
  }
  return key;
}

}  // namespace pingpong::exact
