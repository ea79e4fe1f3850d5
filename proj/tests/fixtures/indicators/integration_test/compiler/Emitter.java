package compiler;

public class Emitter {
    public String emit(String input) {
        return input;
    }
}
