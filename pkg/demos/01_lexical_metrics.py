"""
Tour of the lexical metrics
===========================

Every feature the re-ranker uses is a closed-form function of tokens.
This script walks through each one on tiny inputs you can check by hand.
"""

from summrank import bleu, diversity, length_score, mean_rouge, rouge_l, rouge_n, tokenize

candidate = tokenize("the cat sat on the mat")
reference = tokenize("the cat is on the mat")

# unigram and bigram overlap, clipped by occurrence counts
r1 = rouge_n(candidate, reference, 1)
r2 = rouge_n(candidate, reference, 2)
print(f"R-1 P={r1.precision:.4f} R={r1.recall:.4f} F={r1.f1:.4f}")
print(f"R-2 P={r2.precision:.4f} R={r2.recall:.4f} F={r2.f1:.4f}")

# longest common subsequence rewards in-order matches
print(f"R-L F={rouge_l(candidate, reference).f1:.4f}")

# the three combined is the quantity every selection strategy optimizes
print(f"mean ROUGE = {mean_rouge('the cat sat on the mat', 'the cat is on the mat'):.4f}")

# BLEU with clipping: repeating "the cat" does not pay
print(f"BLEU = {bleu(tokenize('the cat the cat'), tokenize('the cat sat')):.4f}")

# diversity penalizes repeated n-grams; a repetitive candidate drops fast
print(f"diversity('a a b a')    = {diversity(tokenize('a a b a')).value:.4f}")
print(f"diversity('a b c d')    = {diversity(tokenize('a b c d')).value:.4f}")

# the length feature peaks when a candidate matches the corpus mean length
for n_tokens in (6, 10, 14):
    print(f"length_score({n_tokens}, mu=10) = {length_score(n_tokens, 10.0).value:.4f}")
