function Point(x, y) {
  if (!new.target) return new Point(x, y);
  this.x = x;
  this.y = y;
}
Point.prototype.norm2 = function () { return this.x * this.x + this.y * this.y; };
var p = Point(3, 4);
out.push(p instanceof Point, p.norm2(), new Point(1, 1).norm2());
