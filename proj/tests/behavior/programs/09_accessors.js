var temperature = {
  _c: 20,
  get fahrenheit() { return this._c * 9 / 5 + 32; },
  set fahrenheit(f) { this._c = (f - 32) * 5 / 9; }
};
class Box {
  #v = 1;
  get v() { return this.#v; }
  set v(x) { this.#v = x * 2; }
}
out.push(temperature.fahrenheit);
temperature.fahrenheit = 212;
out.push(temperature._c);
var b = new Box();
b.v = 5;
out.push(b.v);
