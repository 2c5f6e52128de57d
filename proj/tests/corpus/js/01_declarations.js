function alpha() {
  return 1;
}

function beta(a, b) {
  function gamma(c) {
    function delta(d) {
      return d * 2;
    }
    return delta(c) + 1;
  }
  return gamma(a) + b;
}

function unused(x) {
  if (x > 10) {
    return x - 10;
  }
  return x;
}

alpha();
beta(1, 2);
