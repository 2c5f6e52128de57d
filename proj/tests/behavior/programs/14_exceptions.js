function risky(n) {
  if (n > 2) throw new RangeError("too big: " + n);
  return n;
}
function guarded(n) {
  try { return "ok " + risky(n); }
  catch (e) { return e.name + " " + e.message; }
  finally { out.push("finally " + n); }
}
out.push(guarded(1), guarded(5));
