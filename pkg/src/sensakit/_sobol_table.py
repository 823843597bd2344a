"""Joe & Kuo D(6) primitive polynomials and initial direction numbers.

First 21 dimensions of the published table (new-joe-kuo-6); dimension 1 is
the van der Corput sequence and needs no entry. Each row is
(polynomial_bits, (m_1, ..., m_s)) for dimensions 2..21 in order.
"""

MAX_DIM = 21

# polynomial_bits encodes x^s + a_1 x^(s-1) + ... + a_{s-1} x + 1 as an
# integer with s = bit_length - 1.
DIRECTIONS = (
    (3, (1,)),
    (7, (1, 3)),
    (11, (1, 3, 1)),
    (13, (1, 1, 1)),
    (19, (1, 1, 3, 3)),
    (25, (1, 3, 5, 13)),
    (37, (1, 1, 5, 5, 17)),
    (41, (1, 1, 5, 5, 5)),
    (47, (1, 1, 7, 11, 19)),
    (55, (1, 1, 5, 1, 1)),
    (59, (1, 1, 1, 3, 11)),
    (61, (1, 3, 5, 5, 31)),
    (67, (1, 3, 3, 9, 7, 49)),
    (91, (1, 1, 1, 15, 21, 21)),
    (97, (1, 3, 1, 13, 27, 49)),
    (103, (1, 1, 1, 15, 7, 5)),
    (109, (1, 3, 1, 15, 13, 25)),
    (115, (1, 1, 5, 5, 19, 61)),
    (131, (1, 3, 7, 11, 23, 15, 103)),
    (137, (1, 3, 7, 13, 13, 15, 69)),
)
