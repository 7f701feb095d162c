#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "qpl/field.hpp"

namespace qpl {

// One letter of a group word: a factor of the space, possibly inverted.
struct WordLetter {
  int factor = 0;
  bool inverse = false;
};

struct Word {
  std::vector<WordLetter> letters;
};

struct WordParseError : std::runtime_error {
  int offset;
  WordParseError(const std::string& msg, int off)
      : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

// Grammar: a word is a juxtaposition of letters; a letter is a lowercase
// name character, optionally followed by a decimal index (e.g. "x", "a1",
// "b12") and by a single quote marking the inverse. Whitespace separates
// letters. `names` maps name strings ("a1") to factor indices.
Word parse_word(const std::string& text, const std::map<std::string, int>& names);

// Names for the standard generator layout: h doubles contribute a1..ah and
// b1..bh (their two factors in order), then r loose factors c1..cr.
std::map<std::string, int> generator_names(int genus, int boundary);

CMat eval_word(const ModelSpace& S, const Word& w, const Point& m);

// Right-trivialized differential of the word map W: S -> G at m, as the
// d x D matrix R with theta^R(dW(v)) = R v for v in the global left frame.
// Walking the letters with prefix u: a direct letter on factor j adds
// Ad_{u g_j} to the factor-j columns, an inverted one adds -Ad_u, and u
// advances by the letter's value.
RMat word_right_jacobian(const ModelSpace& S, const GroupModel& G, const Word& w, const Point& m);

// The word map as a SmoothMap into a one-factor group space (exact jacobian
// Ad_{W(m)^{-1}} R(m), rows in the target's left frame).
SmoothMap word_map(const ModelSpace& S, const ModelSpace& Gspace, const Word& w);

// Moment data attached to one acting slot: an equivariant map into the slot
// group (or its algebra), with its right-trivialized tangent matrix. For
// algebra-valued components rmat is the plain coordinate jacobian.
struct MomentComponent {
  ModelPtr target;
  bool group_valued = true;
  std::function<CMat(const Point&)> value;
  std::function<RVec(const Point&)> alg_value;
  std::function<RMat(const Point&)> rmat;
  bool exact = false;
};

MomentComponent word_moment(const ModelSpace& S, ModelPtr target, const Word& w);
// Pointwise product (A B): R = R_A + Ad_{A} R_B.
MomentComponent moment_product(const ModelSpace& S, const MomentComponent& A,
                               const MomentComponent& B);
// Pointwise inverse: R = -Ad_{Phi^{-1}} R_Phi.
MomentComponent moment_inverse(const ModelSpace& S, const MomentComponent& A);
// exp-composed moment of an algebra-valued component: value exp(x), with
// R = ((e^s - 1)/s)(ad_x) J_x.
MomentComponent exp_moment(const ModelSpace& S, const MomentComponent& alg);
// log-composed moment of a group-valued component: J = (s/(e^s - 1))(ad_x) R.
MomentComponent log_moment(const ModelSpace& S, const MomentComponent& grp);
// The identity-of-a-factor moment (word of one direct letter).
MomentComponent factor_moment(const ModelSpace& S, int factor);
// Algebra-valued moment reading off an algebra factor's coordinates.
MomentComponent algebra_factor_moment(const ModelSpace& S, int factor);

// Pullback 1-forms Phi^* theta_a^R (row a of rmat) and Phi^* theta_a^L
// (row a of Ad_{Phi^{-1}} rmat), with FD coefficient derivatives.
MultiVectorField moment_pullback_right(const ModelSpace& S, const MomentComponent& mc, int a);
MultiVectorField moment_pullback_left(const ModelSpace& S, const MomentComponent& mc, int a);

}  // namespace qpl
