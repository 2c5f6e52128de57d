class Carousel {
  constructor(el) {
    this.el = el;
    this.index = 0;
  }
  next() {
    this.index = (this.index + 1) % 3;
    return this.index;
  }
  previous() {
    this.index = (this.index + 2) % 3;
    return this.index;
  }
  autoplay(intervalMs) {
    const slides = Array.from(this.el ? this.el.querySelectorAll('.slide') : []);
    let paused = false;
    const timer = setInterval(() => {
      if (paused) return;
      slides.forEach((s, i) => s.classList.toggle('active', i === this.index));
      this.next();
    }, intervalMs);
    if (this.el) {
      this.el.addEventListener('mouseenter', () => { paused = true; });
      this.el.addEventListener('mouseleave', () => { paused = false; });
    }
    return () => clearInterval(timer);
  }
}

const Tooltip = {
  show(target, text) {
    const tip = document.createElement('div');
    tip.className = 'tooltip';
    tip.textContent = text;
    const rect = target.getBoundingClientRect();
    tip.style.left = rect.left + window.scrollX + 'px';
    tip.style.top = rect.bottom + window.scrollY + 4 + 'px';
    document.body.appendChild(tip);
    target.addEventListener('mouseleave', function hide() {
      tip.remove();
      target.removeEventListener('mouseleave', hide);
    });
    return tip;
  },
};

const carousel = new Carousel(null);
carousel.next();
