/**
 * CodeViewer: shows the source of the selected entity, scrolled to its
 * span, with the entity's lines and conditional-compilation directives
 * visually marked.
 */

import { CodeViewTarget } from "./state.js";

const DIRECTIVE_RE = /^\s*#\s*(if|ifdef|ifndef|elif|else|endif)\b/;

export interface CodeViewer {
  container: HTMLElement;
  show(target: CodeViewTarget): Promise<void>;
  clear(): void;
}

export function createCodeViewer(
  container: HTMLElement,
  fetchSource: (file: string) => Promise<string>,
): CodeViewer {
  const doc = container.ownerDocument;

  const render = (file: string, text: string, target: CodeViewTarget): void => {
    container.textContent = "";
    const title = doc.createElement("div");
    title.className = "code-title";
    title.textContent = file;
    container.appendChild(title);
    const pre = doc.createElement("pre");
    pre.className = "code-lines";
    text.split("\n").forEach((line, index) => {
      const number = index + 1;
      const row = doc.createElement("span");
      row.className = "code-line";
      if (number >= target.start && number <= target.end) {
        row.classList.add("entity-span");
      }
      if (DIRECTIVE_RE.test(line)) {
        row.classList.add("cpp-directive");
      }
      row.dataset.line = String(number);
      row.textContent = `${String(number).padStart(4, " ")}  ${line}\n`;
      pre.appendChild(row);
    });
    container.appendChild(pre);
    const first = pre.querySelector(".entity-span");
    if (first && typeof (first as HTMLElement).scrollIntoView === "function") {
      (first as HTMLElement).scrollIntoView({ block: "center" });
    }
  };

  return {
    container,
    async show(target: CodeViewTarget): Promise<void> {
      try {
        const text = await fetchSource(target.file);
        render(target.file, text, target);
      } catch (error) {
        container.textContent = "";
        const banner = doc.createElement("div");
        banner.className = "code-error";
        banner.textContent = `cannot load ${target.file}: ${String(error)}`;
        container.appendChild(banner);
      }
    },
    clear(): void {
      container.textContent = "";
    },
  };
}
