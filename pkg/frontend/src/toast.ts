/** Transient hint messages and sticky error banners. */

export type ToastKind = "info" | "error";

let host: HTMLElement | null = null;

export function mountToasts(container: HTMLElement): void {
  host = document.createElement("div");
  host.className = "toasts";
  container.appendChild(host);
}

export function showToast(message: string, kind: ToastKind = "info", ttlMs = 4000): HTMLElement {
  if (!host) throw new Error("toasts not mounted");
  const el = document.createElement("div");
  el.className = `toast toast-${kind}`;
  el.textContent = message;
  host.appendChild(el);
  if (ttlMs > 0) setTimeout(() => el.remove(), ttlMs);
  return el;
}

export function renderBanner(container: HTMLElement, message: string | null): void {
  let banner = container.querySelector<HTMLElement>(".banner");
  if (!message) {
    banner?.remove();
    return;
  }
  if (!banner) {
    banner = document.createElement("div");
    banner.className = "banner";
    container.prepend(banner);
  }
  banner.textContent = message;
}
